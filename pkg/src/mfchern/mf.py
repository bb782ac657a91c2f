"""Graded vector bundles, matrix factorizations, and their hom complexes.

Bundles are given by transition cocycles over the ordered cover; a matrix
factorization adds a degree-1 endomorphism squaring to the potential.  The
hom complex pairs the patchwise differentials with the Cech differential.
"""

from __future__ import annotations

from fractions import Fraction

from .cech import CechCochain, MatrixForm, acw_product, cech_differential, pullback_matrix
from .geometry import reroot
from .rings import LocalFrac, parse_scalar

__all__ = [
    "VectorBundle",
    "MatrixFactorization",
    "MorphismCochain",
    "RetractData",
    "EquivariantStructure",
    "MFReport",
    "check_mf",
    "koszul_mf",
    "hom_differential",
    "direct_sum",
    "shift",
    "group_twist",
    "twist_by_character",
    "invert_matrix",
]


def invert_matrix(ring, rows):
    """Exact inverse of a square matrix of LocalFracs by elimination with
    unit pivots.  Raises when no unit pivot is available."""
    n = len(rows)
    aug = [
        [v for v in row] + [ring.one() if k == r else ring.zero() for k in range(n)]
        for r, row in enumerate(rows)
    ]
    assert all(len(row) == 2 * n for row in aug)
    for c in range(n):
        pivot = None
        for r in range(c, n):
            if aug[r][c].inverse() is not None:
                pivot = r
                break
        if pivot is None:
            raise ValueError("matrix not invertible over the localization")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        inv = aug[c][c].unit_inverse()
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and not aug[r][c].is_zero():
                f = aug[r][c]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


class VectorBundle:
    """Transition-cocycle presentation of a graded locally free module.

    gradings are integers under Z grading and 0/1 under Z2; transitions map
    ordered pairs (i, j), i < j, to matrices over the pair intersection ring
    carrying frame j into frame i.
    """

    def __init__(self, scheme, gradings, transitions, inverses=None):
        self.scheme = scheme
        self.gradings = tuple(gradings)
        if scheme.grading == "Z2":
            assert all(g in (0, 1) for g in self.gradings)
        self._parities = tuple(g % 2 for g in self.gradings)
        rank = len(self.gradings)
        self.transitions = {}
        self.inverses = {}
        for (i, j), rows in transitions.items():
            assert i < j
            ring = scheme.intersection((i, j)).ring
            mat = [[self._coerce(ring, v) for v in row] for row in rows]
            assert len(mat) == rank and all(len(r) == rank for r in mat)
            for r in range(rank):
                for c in range(rank):
                    if not mat[r][c].is_zero():
                        assert self.gradings[r] == self.gradings[c], (
                            f"transition ({i},{j}) entry ({r},{c}) is not degree 0"
                        )
            self.transitions[(i, j)] = mat
            if inverses and (i, j) in inverses:
                inv = [[self._coerce(ring, v) for v in row] for row in inverses[(i, j)]]
            else:
                inv = invert_matrix(ring, mat)
            for r in range(rank):
                for c in range(rank):
                    want = ring.one() if r == c else ring.zero()
                    got = sum(
                        (mat[r][k] * inv[k][c] for k in range(rank)),
                        ring.zero(),
                    )
                    assert got == want, f"declared inverse wrong at ({i},{j})"
            self.inverses[(i, j)] = inv
        for pair in scheme.tuples(2):
            assert pair in self.transitions, f"missing transition for overlap {pair}"
        self._check_cocycle()

    @staticmethod
    def _coerce(ring, v):
        if isinstance(v, LocalFrac):
            assert v.ring.name == ring.name
            return v
        if isinstance(v, str):
            return parse_scalar(ring, v)
        return ring.const(v)

    def _check_cocycle(self):
        for (i, j, k) in self.scheme.tuples(3):
            ring = self.scheme.intersection((i, j, k)).ring
            gij = self._matrix_form(ring, (i, j))
            gik = self._matrix_form(ring, (i, k))
            rm = self.scheme.restriction((j, k), (i, j, k))
            gjk = pullback_matrix(rm, self._matrix_form(None, (j, k)))
            assert gij.mul(gjk) == gik, f"cocycle fails on triple ({i},{j},{k})"

    def _matrix_form(self, ring, pair, inverse=False):
        src = self.scheme.intersection(pair).ring
        rows = self.inverses[pair] if inverse else self.transitions[pair]
        terms = {}
        for r, row in enumerate(rows):
            for c, v in enumerate(row):
                if not v.is_zero():
                    if ring is not None and ring.name != src.name:
                        v = reroot(ring, v)
                    terms[(r, c, (), 0)] = v
        return MatrixForm(ring or src, self._parities, self._parities, terms)

    def rank(self):
        return len(self.gradings)

    def parities(self):
        return self._parities

    def transition(self, scheme, ring, i, j):
        assert scheme is self.scheme and i < j
        return self._matrix_form(ring, (i, j))

    def transition_inverse(self, scheme, ring, i, j):
        assert scheme is self.scheme and i < j
        return self._matrix_form(ring, (i, j), inverse=True)


class MatrixFactorization:
    """A bundle with a degree-1 patchwise endomorphism squaring to w."""

    def __init__(self, bundle, deltas):
        self.bundle = bundle
        self.scheme = bundle.scheme
        n = self.scheme.npatches()
        assert len(deltas) == n
        self.deltas = []
        rank = bundle.rank()
        for i, rows in enumerate(deltas):
            ring = self.scheme.patch_ring(i)
            mat = [[VectorBundle._coerce(ring, v) for v in row] for row in rows]
            assert len(mat) == rank and all(len(r) == rank for r in mat)
            for r in range(rank):
                for c in range(rank):
                    if mat[r][c].is_zero():
                        continue
                    if self.scheme.grading == "Z":
                        assert bundle.gradings[r] == bundle.gradings[c] + 1, (
                            f"delta entry ({r},{c}) on patch {i} is not degree 1"
                        )
                    else:
                        assert bundle.gradings[r] != bundle.gradings[c], (
                            f"delta entry ({r},{c}) on patch {i} is not odd"
                        )
            self.deltas.append(mat)

    def rank(self):
        return self.bundle.rank()

    def delta_matrix_form(self, i, ring=None):
        src = self.scheme.patch_ring(i)
        terms = {}
        for r, row in enumerate(self.deltas[i]):
            for c, v in enumerate(row):
                if not v.is_zero():
                    if ring is not None and ring.name != src.name:
                        v = reroot(ring, v)
                    terms[(r, c, (), 0)] = v
        p = self.bundle.parities()
        return MatrixForm(ring or src, p, p, terms)

    def delta_cochain(self, u_truncation):
        entries = {}
        for (i,) in self.scheme.tuples(1):
            mf = self.delta_matrix_form(i)
            if not mf.is_zero():
                entries[(i,)] = mf
        return CechCochain(
            self.scheme, self.bundle, self.bundle, entries, u_truncation
        )


class MFReport:

    __slots__ = ("ok", "failures")

    def __init__(self, failures):
        self.failures = list(failures)
        self.ok = not self.failures

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "MFReport(ok)" if self.ok else f"MFReport({self.failures!r})"


def check_mf(P):
    """Verify delta^2 = w id patchwise and transition compatibility on
    overlaps; returns a report instead of raising."""
    failures = []
    scheme = P.scheme
    rank = P.rank()
    for i in range(scheme.npatches()):
        ring = scheme.patch_ring(i)
        w = scheme.potential(i)
        d = P.deltas[i]
        for r in range(rank):
            for c in range(rank):
                got = sum((d[r][k] * d[k][c] for k in range(rank)), ring.zero())
                want = w if r == c else ring.zero()
                if got != want:
                    failures.append(
                        f"patch {i}: delta^2 entry ({r},{c}) is {got}, expected {want}"
                    )
    for (i, j) in scheme.tuples(2):
        inter = scheme.intersection((i, j))
        ring = inter.ring
        g = P.bundle.transitions[(i, j)]
        di = [[inter.restrictions[i].apply(v) for v in row] for row in P.deltas[i]]
        dj = [[inter.restrictions[j].apply(v) for v in row] for row in P.deltas[j]]
        for r in range(rank):
            for c in range(rank):
                lhs = sum((g[r][k] * dj[k][c] for k in range(rank)), ring.zero())
                rhs = sum((di[r][k] * g[k][c] for k in range(rank)), ring.zero())
                if lhs != rhs:
                    failures.append(
                        f"overlap ({i},{j}): g delta_j != delta_i g at ({r},{c})"
                    )
    return MFReport(failures)


def _subsets_ordered(m):
    out = [()]
    for j in range(m):
        out = out + [s + (j,) for s in out]
    return sorted(out, key=lambda s: (len(s), s))


def koszul_mf(scheme, a, b):
    """Exterior-algebra factorization of w = sum a_j b_j.

    a and b are lists over the index j of per-patch scalars; the underlying
    bundle is the exterior algebra on m generators with identity transitions.
    """
    m = len(a)
    assert len(b) == m
    npatch = scheme.npatches()
    a = [
        [parse_scalar(scheme.patch_ring(i), v) for i, v in enumerate(row)]
        for row in a
    ]
    b = [
        [parse_scalar(scheme.patch_ring(i), v) for i, v in enumerate(row)]
        for row in b
    ]
    for i in range(npatch):
        total = sum((a[j][i] * b[j][i] for j in range(m)), scheme.patch_ring(i).zero())
        if total != scheme.potential(i):
            raise ValueError(
                f"sum a_j b_j = {total} differs from the potential on patch {i}"
            )
    basis = _subsets_ordered(m)
    index = {s: k for k, s in enumerate(basis)}
    if scheme.grading == "Z":
        gradings = [len(s) for s in basis]
    else:
        gradings = [len(s) % 2 for s in basis]
    transitions = {
        pair: [
            [
                scheme.intersection(pair).ring.one()
                if r == c
                else scheme.intersection(pair).ring.zero()
                for c in range(len(basis))
            ]
            for r in range(len(basis))
        ]
        for pair in scheme.tuples(2)
    }
    bundle = VectorBundle(scheme, gradings, transitions)
    deltas = []
    for i in range(npatch):
        ring = scheme.patch_ring(i)
        mat = [[ring.zero() for _ in basis] for _ in basis]
        for s in basis:
            col = index[s]
            for j in range(m):
                below = sum(1 for x in s if x < j)
                if j not in s:
                    wedge = tuple(sorted(s + (j,)))
                    mat[index[wedge]][col] = mat[index[wedge]][col] + a[j][i] * (
                        (-1) ** below
                    )
                else:
                    dropped = tuple(x for x in s if x != j)
                    mat[index[dropped]][col] = mat[index[dropped]][col] + b[j][i] * (
                        (-1) ** below
                    )
        deltas.append(mat)
    P = MatrixFactorization(bundle, deltas)
    report = check_mf(P)
    assert report.ok, report.failures
    return P


def random_global_section(
    rng, source, target, source_twists, target_twists, parity, u_truncation, bound=3
):
    """Random global Hom-section on a two-patch scheme whose transitions are
    diagonal monomial twists.

    Entry (r, c) glues iff it is a polynomial of degree at most
    source_twists[c] - target_twists[r] in the first chart; the second chart
    holds the reversed coefficients.  Returns None when every admissible
    window came out zero."""
    scheme = source.scheme
    assert scheme.npatches() == 2, "sampler assumes a two-patch cover"
    psrc = source.bundle.parities()
    ptgt = target.bundle.parities()
    assert len(source_twists) == len(psrc) and len(target_twists) == len(ptgt)
    r0 = scheme.patch_ring(0)
    r1 = scheme.patch_ring(1)
    assert len(r0.vars) == 1 and len(r1.vars) == 1
    v0 = r0.var(r0.vars[0])
    v1 = r1.var(r1.vars[0])
    m0 = [[r0.zero()] * len(psrc) for _ in range(len(ptgt))]
    m1 = [[r1.zero()] * len(psrc) for _ in range(len(ptgt))]
    got = False
    for r in range(len(ptgt)):
        for c in range(len(psrc)):
            if (ptgt[r] + psrc[c]) % 2 != parity % 2:
                continue
            win = source_twists[c] - target_twists[r]
            if win < 0:
                continue
            coeffs = [rng.randint(-bound, bound) for _ in range(win + 1)]
            if all(q == 0 for q in coeffs):
                continue
            got = True
            p0 = r0.zero()
            p1 = r1.zero()
            for k, q in enumerate(coeffs):
                if q:
                    p0 = p0 + r0.const(q) * v0**k
                    p1 = p1 + r1.const(q) * v1 ** (win - k)
            m0[r][c] = p0
            m1[r][c] = p1
    if not got:
        return None
    e0 = MatrixForm.from_entries(r0, ptgt, psrc, m0)
    e1 = MatrixForm.from_entries(r1, ptgt, psrc, m1)
    return MorphismCochain.from_entries(
        source, target, {(0,): e0, (1,): e1}, u_truncation
    )


class MorphismCochain:
    """A Cech cochain of Hom-valued entries between two factorizations."""

    __slots__ = ("source", "target", "cochain")

    def __init__(self, source, target, cochain):
        assert isinstance(source, MatrixFactorization)
        assert isinstance(target, MatrixFactorization)
        assert isinstance(cochain, CechCochain)
        assert cochain.source is source.bundle and cochain.target is target.bundle
        self.source = source
        self.target = target
        self.cochain = cochain

    @classmethod
    def from_entries(cls, source, target, entries, u_truncation):
        c = CechCochain(
            source.scheme, source.bundle, target.bundle, entries, u_truncation
        )
        return cls(source, target, c)

    @classmethod
    def identity(cls, P, u_truncation):
        entries = {}
        for (i,) in P.scheme.tuples(1):
            ring = P.scheme.patch_ring(i)
            entries[(i,)] = MatrixForm.identity(ring, P.bundle.parities())
        return cls.from_entries(P, P, entries, u_truncation)

    def is_zero(self):
        return self.cochain.is_zero()

    def parity(self):
        return self.cochain.homogeneous_total_parity()

    def __add__(self, other):
        assert isinstance(other, MorphismCochain)
        assert other.source is self.source and other.target is self.target
        return MorphismCochain(self.source, self.target, self.cochain + other.cochain)

    def __neg__(self):
        return MorphismCochain(self.source, self.target, -self.cochain)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        return MorphismCochain(self.source, self.target, self.cochain.scale(scalar))

    def compose(self, other):
        """self after other."""
        assert isinstance(other, MorphismCochain)
        assert other.target is self.source, "composition shape mismatch"
        return MorphismCochain(
            other.source, self.target, acw_product(self.cochain, other.cochain)
        )

    def differential(self):
        return hom_differential(self)

    def __eq__(self, other):
        assert isinstance(other, MorphismCochain)
        return (
            self.source is other.source
            and self.target is other.target
            and self.cochain == other.cochain
        )

    def canonical_key(self):
        return (id(self.source), id(self.target), self.cochain.canonical_string())

    def __repr__(self):
        return f"MorphismCochain({self.cochain.canonical_string()!r})"


def _split_by_total_parity(cochain):
    parts = {0: {}, 1: {}}
    for tup, mf in cochain.entries.items():
        for key, f in mf.terms.items():
            p = (len(tup) - 1 + mf.term_total_parity(key)) % 2
            parts[p].setdefault(tup, {})[key] = f
    out = {}
    for p, entries in parts.items():
        if entries:
            out[p] = CechCochain(
                cochain.scheme,
                cochain.source,
                cochain.target,
                {
                    tup: MatrixForm(
                        cochain.scheme.intersection(tup).ring,
                        cochain.target.parities(),
                        cochain.source.parities(),
                        terms,
                    )
                    for tup, terms in entries.items()
                },
                cochain.u_truncation,
            )
    return out


def hom_differential(phi):
    """delta_target after phi, minus (-1)^{|phi|} phi after delta_source,
    plus the Cech differential of phi; squares to zero in the curved sense."""
    assert isinstance(phi, MorphismCochain)
    trunc = phi.cochain.u_truncation
    dQ = phi.target.delta_cochain(trunc)
    dP = phi.source.delta_cochain(trunc)
    out = None
    for parity, part in _split_by_total_parity(phi.cochain).items():
        piece = cech_differential(part)
        piece = piece + acw_product(dQ, part)
        piece = piece + acw_product(part, dP).scale(-((-1) ** parity))
        out = piece if out is None else out + piece
    if out is None:
        out = CechCochain(
            phi.cochain.scheme,
            phi.source.bundle,
            phi.target.bundle,
            {},
            trunc,
        )
    return MorphismCochain(phi.source, phi.target, out)


class RetractData:
    """A factorization P exhibited as a summand of N."""

    __slots__ = ("P", "N", "g", "f", "pi")

    def __init__(self, P, N, g, f):
        assert isinstance(g, MorphismCochain) and isinstance(f, MorphismCochain)
        assert g.source is P and g.target is N
        assert f.source is N and f.target is P
        trunc = min(g.cochain.u_truncation, f.cochain.u_truncation)
        one_P = MorphismCochain.identity(P, trunc)
        assert (f.compose(g) - one_P).is_zero(), "f g != 1_P"
        assert g.differential().is_zero(), "g is not closed"
        assert f.differential().is_zero(), "f is not closed"
        self.P = P
        self.N = N
        self.g = g
        self.f = f
        self.pi = g.compose(f)
        assert (self.pi.compose(self.pi) - self.pi).is_zero(), "pi not idempotent"


def direct_sum(P, Q):
    assert P.scheme is Q.scheme
    scheme = P.scheme
    gradings = P.bundle.gradings + Q.bundle.gradings
    rp, rq = P.rank(), Q.rank()
    transitions = {}
    inverses = {}
    for pair in scheme.tuples(2):
        ring = scheme.intersection(pair).ring
        zero = ring.zero()

        def block(mp, mq):
            rows = []
            for r in range(rp):
                rows.append([mp[r][c] for c in range(rp)] + [zero] * rq)
            for r in range(rq):
                rows.append([zero] * rp + [mq[r][c] for c in range(rq)])
            return rows

        transitions[pair] = block(P.bundle.transitions[pair], Q.bundle.transitions[pair])
        inverses[pair] = block(P.bundle.inverses[pair], Q.bundle.inverses[pair])
    bundle = VectorBundle(scheme, gradings, transitions, inverses)
    deltas = []
    for i in range(scheme.npatches()):
        ring = scheme.patch_ring(i)
        zero = ring.zero()
        rows = []
        for r in range(rp):
            rows.append([P.deltas[i][r][c] for c in range(rp)] + [zero] * rq)
        for r in range(rq):
            rows.append([zero] * rp + [Q.deltas[i][r][c] for c in range(rq)])
        deltas.append(rows)
    return MatrixFactorization(bundle, deltas)


def shift(P):
    """Swap (Z2) or raise (Z) the grading and negate delta."""
    scheme = P.scheme
    if scheme.grading == "Z2":
        gradings = tuple(1 - g for g in P.bundle.gradings)
    else:
        gradings = tuple(g + 1 for g in P.bundle.gradings)
    bundle = VectorBundle(
        scheme, gradings, P.bundle.transitions, P.bundle.inverses
    )
    deltas = [
        [[-v for v in row] for row in mat] for mat in P.deltas
    ]
    return MatrixFactorization(bundle, deltas)


def group_twist(P, g):
    """The factorization with the g-action applied to transitions and delta."""
    scheme = P.scheme
    act = scheme.action
    assert act is not None
    transitions = {}
    inverses = {}
    for pair in scheme.tuples(2):
        rho = scheme.action_on(pair, g)
        transitions[pair] = [
            [rho.apply(v) for v in row] for row in P.bundle.transitions[pair]
        ]
        inverses[pair] = [
            [rho.apply(v) for v in row] for row in P.bundle.inverses[pair]
        ]
    bundle = VectorBundle(scheme, P.bundle.gradings, transitions, inverses)
    deltas = []
    for i in range(scheme.npatches()):
        rho = act.map(g, i)
        deltas.append([[rho.apply(v) for v in row] for row in P.deltas[i]])
    return MatrixFactorization(bundle, deltas)


class EquivariantStructure:
    """Per-element isomorphisms phi_g : gP -> P with the twisted cocycle rule
    phi_{gh} = phi_g . g(phi_h), compatible with delta."""

    __slots__ = ("P", "phi")

    def __init__(self, P, phi):
        scheme = P.scheme
        act = scheme.action
        assert act is not None
        self.P = P
        self.phi = {}
        rank = P.rank()
        for g in act.elements:
            mats = phi[g]
            assert len(mats) == scheme.npatches()
            coerced = []
            for i, rows in enumerate(mats):
                ring = scheme.patch_ring(i)
                mat = [[VectorBundle._coerce(ring, v) for v in row] for row in rows]
                for r in range(rank):
                    for c in range(rank):
                        if not mat[r][c].is_zero():
                            assert P.bundle.gradings[r] == P.bundle.gradings[c], (
                                f"phi_{g} not degree 0 at ({r},{c}) on patch {i}"
                            )
                coerced.append(mat)
            self.phi[g] = coerced
        self._validate()

    def _validate(self):
        P = self.P
        scheme = P.scheme
        act = scheme.action
        rank = P.rank()
        e = act.identity
        for i in range(scheme.npatches()):
            ring = scheme.patch_ring(i)
            for r in range(rank):
                for c in range(rank):
                    want = ring.one() if r == c else ring.zero()
                    assert self.phi[e][i][r][c] == want, "phi_e must be the identity"
        for g in act.elements:
            for h in act.elements:
                gh = act.mult(g, h)
                for i in range(scheme.npatches()):
                    ring = scheme.patch_ring(i)
                    rho = act.map(g, i)
                    lhs = self.phi[gh][i]
                    for r in range(rank):
                        for c in range(rank):
                            got = sum(
                                (
                                    self.phi[g][i][r][k] * rho.apply(self.phi[h][i][k][c])
                                    for k in range(rank)
                                ),
                                ring.zero(),
                            )
                            assert got == lhs[r][c], (
                                f"phi cocycle fails for ({g},{h}) on patch {i}"
                            )
        # compatibility with delta: delta phi_g = phi_g g(delta)
        for g in act.elements:
            for i in range(scheme.npatches()):
                ring = scheme.patch_ring(i)
                rho = act.map(g, i)
                for r in range(rank):
                    for c in range(rank):
                        lhs = sum(
                            (
                                P.deltas[i][r][k] * self.phi[g][i][k][c]
                                for k in range(rank)
                            ),
                            ring.zero(),
                        )
                        rhs = sum(
                            (
                                self.phi[g][i][r][k] * rho.apply(P.deltas[i][k][c])
                                for k in range(rank)
                            ),
                            ring.zero(),
                        )
                        assert lhs == rhs, (
                            f"phi_{g} does not intertwine delta on patch {i}"
                        )
        # transitions: phi is a morphism of bundles gP -> P
        for (i, j) in scheme.tuples(2):
            inter = scheme.intersection((i, j))
            ring = inter.ring
            gij = P.bundle.transitions[(i, j)]
            for g in act.elements:
                phi_i = [
                    [inter.restrictions[i].apply(v) for v in row]
                    for row in self.phi[g][i]
                ]
                phi_j = [
                    [inter.restrictions[j].apply(v) for v in row]
                    for row in self.phi[g][j]
                ]
                rho = scheme.action_on((i, j), g)
                for r in range(rank):
                    for c in range(rank):
                        lhs = sum(
                            (gij[r][k] * phi_j[k][c] for k in range(rank)),
                            ring.zero(),
                        )
                        rhs = sum(
                            (phi_i[r][k] * rho.apply(gij[k][c]) for k in range(rank)),
                            ring.zero(),
                        )
                        assert lhs == rhs, (
                            f"phi_{g} not compatible with transition ({i},{j})"
                        )

    def phi_matrix_form(self, g, i, ring=None):
        src = self.P.scheme.patch_ring(i)
        terms = {}
        for r, row in enumerate(self.phi[g][i]):
            for c, v in enumerate(row):
                if not v.is_zero():
                    if ring is not None and ring.name != src.name:
                        v = reroot(ring, v)
                    terms[(r, c, (), 0)] = v
        p = self.P.bundle.parities()
        return MatrixForm(ring or src, p, p, terms)


def twist_by_character(structure, character):
    """Scale each phi_g by a character value chi(g) in Q."""
    act = structure.P.scheme.action
    e = act.identity
    assert character[e] == 1
    for g in act.elements:
        for h in act.elements:
            assert character[act.mult(g, h)] == character[g] * character[h], (
                "character is not multiplicative"
            )
    phi = {
        g: [
            [[v * Fraction(character[g]) for v in row] for row in mat]
            for mat in structure.phi[g]
        ]
        for g in act.elements
    }
    return EquivariantStructure(structure.P, phi)
