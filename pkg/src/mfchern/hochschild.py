"""Cyclic chains over a small category of parity-graded objects, the b and B
operators, normalization, and the connection trace map into scalar cochains.

Two backends share one chain type: a geometric category whose morphisms are
Cech cochains between matrix factorizations, and a five-dimensional formal
retract category used for exact bookkeeping checks.
"""

import itertools
from fractions import Fraction
from math import factorial

from .cech import (
    CechCochain,
    MatrixForm,
    acw_product,
    form_derivative,
    identity_cochain,
    supertrace,
)
from .mf import MorphismCochain, hom_differential, _split_by_total_parity
from .connection import total_curvature

__all__ = [
    "GeometricCategory",
    "RetractCategory",
    "FormalMorphism",
    "HochschildChain",
    "hochschild_b",
    "cyclic_t",
    "connes_B",
    "normalize",
    "tr_nabla",
    "nabla_bracket",
    "eta_pi",
    "xi_sequence",
    "xi_recursion_check",
]


# -- geometric backend -------------------------------------------------------


class GeometricCategory:
    """Morphisms are MorphismCochains between matrix factorizations on one
    scheme; the differential is the hom differential; the curvature of an
    object is the potential times its identity."""

    def __init__(self, scheme, u_truncation):
        self.scheme = scheme
        self.u_truncation = u_truncation
        self._ids = {}

    def object_key(self, P):
        key = self._ids.get(id(P))
        if key is None:
            key = len(self._ids)
            self._ids[id(P)] = key
        return key

    def same_object(self, P, Q):
        return P is Q

    def source(self, a):
        return a.source

    def target(self, a):
        return a.target

    def parity(self, a):
        p = a.parity()
        assert p is not None, "chain entries must be parity homogeneous"
        return p

    def validate_entry(self, a):
        assert isinstance(a, MorphismCochain)
        for mf in a.cochain.entries.values():
            assert all(k[3] == 0 for k in mf.terms), "chain entries must be u-free"

    def key(self, a):
        return (
            self.object_key(a.source),
            self.object_key(a.target),
            a.cochain.canonical_string(),
        )

    def decompose(self, a):
        """Split into elementary pieces with rational coefficients; the
        labels form a basis, so chains expand multilinearly over them."""
        src = self.object_key(a.source)
        tgt = self.object_key(a.target)
        for tup in sorted(a.cochain.entries):
            mf = a.cochain.entries[tup]
            for (r, c, idxs, m), f in mf.terms.items():
                for exp, q in f.num.terms.items():
                    yield (src, tgt, tup, r, c, idxs, m, exp, f.den), q

    def slot_decompose(self, a):
        """Decomposition in the degenerate quotient: the constant-identity
        direction of an endomorphism slot is projected away."""
        pairs = {}
        for lab, q in self.decompose(a):
            pairs[lab] = pairs.get(lab, Fraction(0)) + q
        if a.source is a.target:
            ident = [lab for lab, _q in self.decompose(self.identity(a.source))]
            lam = pairs.get(min(ident))
            if lam:
                for lab in ident:
                    left = pairs.get(lab, Fraction(0)) - lam
                    if left:
                        pairs[lab] = left
                    else:
                        pairs.pop(lab, None)
        return [(lab, q) for lab, q in pairs.items() if q]

    def compose(self, a, b):
        return a.compose(b)

    def add(self, a, b):
        return a + b

    def scale(self, a, q):
        return a.scale(q)

    def is_zero(self, a):
        return a.is_zero()

    def differential(self, a):
        return hom_differential(a)

    def identity(self, P):
        return MorphismCochain.identity(P, self.u_truncation)

    def is_scalar_identity(self, a):
        c = a.cochain
        if c.is_zero():
            return True
        if len(c.entries) != self.scheme.npatches():
            return False
        q = None
        for tup, mf in c.entries.items():
            if len(tup) != 1:
                return False
            rank = len(mf.row_parities)
            if len(mf.terms) != rank:
                return False
            for (r, col, idxs, m), f in mf.terms.items():
                if r != col or idxs or m:
                    return False
                const = f.as_constant()
                if const is None:
                    return False
                if q is None:
                    q = const
                elif const != q:
                    return False
        return True

    def curvature(self, P):
        entries = {}
        parities = P.bundle.parities()
        for (i,) in self.scheme.tuples(1):
            w = self.scheme.potential(i)
            if w.is_zero():
                continue
            ring = self.scheme.intersection((i,)).ring
            terms = {(r, r, (), 0): w for r in range(len(parities))}
            entries[(i,)] = MatrixForm(ring, parities, parities, terms)
        if not entries:
            return None
        cochain = CechCochain(
            self.scheme, P.bundle, P.bundle, entries, self.u_truncation
        )
        return MorphismCochain(P, P, cochain)


# -- formal retract backend --------------------------------------------------


_BASIS = ("1P", "g", "f", "1N", "pi")
_SOURCE = {"1P": "P", "g": "P", "f": "N", "1N": "N", "pi": "N"}
_TARGET = {"1P": "P", "g": "N", "f": "P", "1N": "N", "pi": "N"}
# left factor composed after right factor; structure constants are all 1
_TABLE = {
    ("1P", "1P"): "1P",
    ("1P", "f"): "f",
    ("g", "1P"): "g",
    ("g", "f"): "pi",
    ("f", "g"): "1P",
    ("f", "1N"): "f",
    ("f", "pi"): "f",
    ("1N", "g"): "g",
    ("pi", "g"): "g",
    ("1N", "1N"): "1N",
    ("1N", "pi"): "pi",
    ("pi", "1N"): "pi",
    ("pi", "pi"): "pi",
}


class FormalMorphism:
    """Exact linear combination of the five basis arrows between P and N."""

    __slots__ = ("source", "target", "coeffs")

    def __init__(self, source, target, coeffs):
        assert source in ("P", "N") and target in ("P", "N")
        clean = {}
        for name, c in coeffs.items():
            assert name in _BASIS, f"unknown arrow {name!r}"
            assert _SOURCE[name] == source and _TARGET[name] == target, (
                f"{name} is not an arrow {source} -> {target}"
            )
            c = Fraction(c)
            if c != 0:
                clean[name] = c
        self.source = source
        self.target = target
        self.coeffs = clean

    @classmethod
    def basis(cls, name):
        return cls(_SOURCE[name], _TARGET[name], {name: Fraction(1)})

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        assert isinstance(other, FormalMorphism)
        assert other.source == self.source and other.target == self.target
        out = dict(self.coeffs)
        for name, c in other.coeffs.items():
            out[name] = out.get(name, Fraction(0)) + c
        return FormalMorphism(self.source, self.target, out)

    def __neg__(self):
        return FormalMorphism(
            self.source, self.target, {n: -c for n, c in self.coeffs.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q):
        q = Fraction(q)
        return FormalMorphism(
            self.source, self.target, {n: c * q for n, c in self.coeffs.items()}
        )

    def compose(self, other):
        """self after other."""
        assert isinstance(other, FormalMorphism)
        assert other.target == self.source, "composition shape mismatch"
        out = {}
        for na, ca in self.coeffs.items():
            for nb, cb in other.coeffs.items():
                name = _TABLE[(na, nb)]
                out[name] = out.get(name, Fraction(0)) + ca * cb
        return FormalMorphism(other.source, self.target, out)

    def __repr__(self):
        if not self.coeffs:
            return f"0:{self.source}->{self.target}"
        return " + ".join(f"{c}*{n}" for n, c in sorted(self.coeffs.items()))


class RetractCategory:
    """The two-object category with fg = 1_P and gf = pi; every arrow is
    even and closed."""

    objects = ("P", "N")

    def object_key(self, obj):
        return obj

    def same_object(self, a, b):
        return a == b

    def source(self, a):
        return a.source

    def target(self, a):
        return a.target

    def parity(self, a):
        return 0

    def validate_entry(self, a):
        assert isinstance(a, FormalMorphism)

    def key(self, a):
        items = tuple(sorted((n, str(c)) for n, c in a.coeffs.items()))
        return (a.source, a.target, items)

    def decompose(self, a):
        for name in sorted(a.coeffs):
            yield (a.source, a.target, name), a.coeffs[name]

    def slot_decompose(self, a):
        return [
            (lab, q)
            for lab, q in self.decompose(a)
            if lab[2] not in ("1P", "1N")
        ]

    def compose(self, a, b):
        return a.compose(b)

    def add(self, a, b):
        return a + b

    def scale(self, a, q):
        return a.scale(q)

    def is_zero(self, a):
        return a.is_zero()

    def differential(self, a):
        return FormalMorphism(a.source, a.target, {})

    def identity(self, obj):
        return FormalMorphism.basis("1P" if obj == "P" else "1N")

    def is_scalar_identity(self, a):
        return set(a.coeffs) <= {"1P"} or set(a.coeffs) <= {"1N"}

    def curvature(self, obj):
        return None


# -- chains ------------------------------------------------------------------


class HochschildChain:
    """Exact linear combination of strings a0[a1|...|an]; each a_j maps
    P_{j+1} -> P_j cyclically.  Coefficients are absorbed into a0 and strings
    with identical slots merge.  Construction normalizes: any string with a
    scalar-identity entry in slots 1..n is dropped."""

    __slots__ = ("category", "u_truncation", "tensor_cap", "strings")

    def __init__(self, category, u_truncation, tensor_cap, items=()):
        self.category = category
        self.u_truncation = u_truncation
        self.tensor_cap = tensor_cap
        self.strings = {}
        cat = category
        for coeff, u_pow, a0, slots in items:
            assert u_pow >= 0
            if u_pow > u_truncation:
                continue
            slots = tuple(slots)
            assert len(slots) <= tensor_cap, "tensor degree above the cap"
            cat.validate_entry(a0)
            for s in slots:
                cat.validate_entry(s)
            chain_entries = (a0,) + slots
            for j in range(len(slots)):
                assert cat.same_object(
                    cat.source(chain_entries[j]), cat.target(chain_entries[j + 1])
                ), "string is not composable"
            assert cat.same_object(
                cat.source(chain_entries[-1]), cat.target(a0)
            ), "string does not close up cyclically"
            if any(cat.is_zero(s) for s in slots):
                continue
            if any(cat.is_scalar_identity(s) for s in slots):
                continue
            scaled = cat.scale(a0, coeff) if coeff != 1 else a0
            if cat.is_zero(scaled):
                continue
            route = (
                cat.object_key(cat.source(a0)),
                cat.object_key(cat.target(a0)),
                cat.parity(a0),
            )
            key = (u_pow, route) + tuple(cat.key(s) for s in slots)
            held = self.strings.get(key)
            if held is None:
                self.strings[key] = (u_pow, scaled, slots)
            else:
                merged = cat.add(held[1], scaled)
                if cat.is_zero(merged):
                    del self.strings[key]
                else:
                    self.strings[key] = (u_pow, merged, slots)
        for key in list(self.strings):
            u_pow, a0, slots = self.strings[key]
            for a in (a0,) + slots:
                cat.parity(a)

    @classmethod
    def single(cls, category, u_truncation, tensor_cap, a0, slots=(), coeff=1, u_pow=0):
        return cls(category, u_truncation, tensor_cap, [(coeff, u_pow, a0, slots)])

    def items(self):
        cat = self.category
        out = []
        for key in sorted(self.strings, key=lambda k: (k[0], k[1:])):
            out.append(self.strings[key])
        return out

    def _expanded(self):
        """Multilinear expansion over elementary labels.  String-level
        merging cannot see relations between entry values, for example a
        Leibniz expansion sitting in one slot, so exact zero tests go
        through this basis."""
        cat = self.category
        out = {}
        for (m, a0, slots) in self.strings.values():
            parts = [list(cat.decompose(a0))]
            for s in slots:
                parts.append(list(cat.slot_decompose(s)))
            for combo in itertools.product(*parts):
                coeff = Fraction(1)
                labels = [m]
                for lab, q in combo:
                    coeff *= q
                    labels.append(lab)
                key = tuple(labels)
                total = out.get(key, Fraction(0)) + coeff
                if total:
                    out[key] = total
                else:
                    out.pop(key, None)
        return out

    def is_zero(self):
        if not self.strings:
            return True
        return not self._expanded()

    def tensor_degrees(self):
        return sorted({len(slots) for (_m, _a, slots) in self.strings.values()})

    def _combine(self, other, flip):
        assert isinstance(other, HochschildChain)
        assert other.category is self.category or (
            isinstance(self.category, RetractCategory)
            and isinstance(other.category, RetractCategory)
        ), "chains live over different categories"
        items = [(1, m, a, s) for (m, a, s) in self.strings.values()]
        sign = -1 if flip else 1
        items += [(sign, m, a, s) for (m, a, s) in other.strings.values()]
        return HochschildChain(
            self.category,
            min(self.u_truncation, other.u_truncation),
            max(self.tensor_cap, other.tensor_cap),
            items,
        )

    def __add__(self, other):
        return self._combine(other, False)

    def __sub__(self, other):
        return self._combine(other, True)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, q):
        items = [(q, m, a, s) for (m, a, s) in self.strings.values()]
        return HochschildChain(self.category, self.u_truncation, self.tensor_cap, items)

    def shift_u(self, k):
        items = [(1, m + k, a, s) for (m, a, s) in self.strings.values()]
        return HochschildChain(self.category, self.u_truncation, self.tensor_cap, items)

    def __eq__(self, other):
        return (self - other).is_zero()

    def canonical_string(self):
        cat = self.category
        lines = []
        for (m, a0, slots) in self.items():
            head = f"u^{m} {cat.key(a0)}"
            tail = " | ".join(str(cat.key(s)) for s in slots)
            lines.append(f"{head} [{tail}]")
        return "\n".join(lines) if lines else "0"

    def __repr__(self):
        return f"HochschildChain({len(self.strings)} strings)"


def normalize(x):
    """Re-run the degenerate-slot quotient; construction already applies it,
    so this is the identity on chains built through the public API."""
    items = [(1, m, a, s) for (m, a, s) in x.strings.values()]
    return HochschildChain(x.category, x.u_truncation, x.tensor_cap, items)


# -- differentials -----------------------------------------------------------


def hochschild_b(x, curved=False):
    """b = b2 + b1 (+ b0 when curved): composition of neighbours including
    the wrap-around, entrywise differentials, and curvature insertions."""
    cat = x.category
    items = []
    for (u_pow, a0, slots) in x.strings.values():
        n = len(slots)
        entries = (a0,) + slots
        parities = [cat.parity(a) for a in entries]

        for i in range(n):
            sign = (-1) ** ((sum(parities[: i + 1]) - i) % 2)
            if i == 0:
                new_a0 = cat.compose(a0, slots[0])
                new_slots = slots[1:]
            else:
                new_a0 = a0
                merged = cat.compose(slots[i - 1], slots[i])
                new_slots = slots[: i - 1] + (merged,) + slots[i + 1 :]
            items.append((sign, u_pow, new_a0, new_slots))

        if n >= 1:
            exponent = (parities[n] - 1) * (sum(parities[:n]) - (n - 1)) + 1
            new_a0 = cat.compose(slots[n - 1], a0)
            items.append(((-1) ** (exponent % 2), u_pow, new_a0, slots[: n - 1]))

        for j in range(n + 1):
            da = cat.differential(entries[j])
            if cat.is_zero(da):
                continue
            sign = (-1) ** ((sum(parities[:j]) - j) % 2)
            if j == 0:
                items.append((sign, u_pow, da, slots))
            else:
                new_slots = slots[: j - 1] + (da,) + slots[j:]
                items.append((sign, u_pow, a0, new_slots))

        if curved:
            for k in range(n + 1):
                h = cat.curvature(cat.source(entries[k]))
                if h is None or cat.is_zero(h):
                    continue
                sign = (-1) ** ((sum(parities[: k + 1]) - k) % 2)
                new_slots = slots[:k] + (h,) + slots[k:]
                items.append((sign, u_pow, a0, new_slots))

    return HochschildChain(cat, x.u_truncation, x.tensor_cap, items)


def cyclic_t(x):
    """Rotate the last-written entry to the front: a0 moves into the last
    slot with the cyclic Koszul sign on shifted degrees."""
    cat = x.category
    items = []
    for (u_pow, a0, slots) in x.strings.values():
        n = len(slots)
        if n == 0:
            items.append((1, u_pow, a0, slots))
            continue
        p0 = cat.parity(a0)
        rest = sum(cat.parity(s) - 1 for s in slots)
        sign = (-1) ** (((p0 - 1) * rest) % 2)
        items.append((sign, u_pow, slots[0], slots[1:] + (a0,)))
    return HochschildChain(cat, x.u_truncation, x.tensor_cap, items)


def connes_B(x):
    """B = s N in the normalized complex: sum the cyclic rotations, then
    prepend an identity."""
    cat = x.category
    items = []
    for (u_pow, a0, slots) in x.strings.values():
        n = len(slots)
        single = HochschildChain(
            cat, x.u_truncation, x.tensor_cap, [(1, u_pow, a0, slots)]
        )
        rotated = single
        for _i in range(n + 1):
            for (m, b0, bslots) in rotated.strings.values():
                one = cat.identity(cat.target(b0))
                items.append((1, m, one, (b0,) + bslots))
            rotated = cyclic_t(rotated)
    return HochschildChain(cat, x.u_truncation, x.tensor_cap, items)


# -- trace map ----------------------------------------------------------------


def nabla_bracket(cochain, conn_target, conn_source):
    """Graded commutator of a connection pair with a Hom-valued cochain:
    entrywise exterior derivative plus the connection terms.

    On tuples of length two or more the source connection matrix has to move
    into the leading frame affinely, T C T^{-1} - dT T^{-1}; transport only
    supplies the conjugation, so the dT T^{-1} part is restored here."""
    trunc = cochain.u_truncation
    scheme = cochain.scheme
    out = form_derivative(cochain)
    ct = conn_target.cochain(trunc)
    cs = conn_source.cochain(trunc)
    for parity, part in _split_by_total_parity(cochain).items():
        if part.is_zero():
            continue
        if not ct.is_zero():
            out = out + acw_product(ct, part)
        if not cs.is_zero():
            out = out - acw_product(part, cs).scale((-1) ** parity)
        gauge = {}
        for t, value in part.entries.items():
            if len(t) < 2:
                continue
            ring = scheme.intersection(t).ring
            g = cochain.source.transition(scheme, ring, t[0], t[-1])
            ginv = cochain.source.transition_inverse(scheme, ring, t[0], t[-1])
            theta = g.mul(ginv.d_form()).scale(-1)
            term = value.mul(theta, cech_left=len(t) - 1)
            if not term.is_zero():
                gauge[t] = term
        if gauge:
            correction = CechCochain(
                scheme, cochain.source, cochain.target, gauge, trunc
            )
            out = out + correction.scale((-1) ** parity)
    return out


def _curvature_powers(P, conn, trunc, jmax):
    R = total_curvature(P, conn, with_u=True, u_truncation=trunc).cochain()
    powers = [identity_cochain(P.scheme, P.bundle, trunc)]
    for _j in range(jmax):
        powers.append(acw_product(powers[-1], R))
    return powers


def _j_vectors(count, total_max):
    if count == 0:
        yield ()
        return
    for first in range(total_max + 1):
        for rest in _j_vectors(count - 1, total_max - first):
            yield (first,) + rest


def tr_nabla(x, connections):
    """Chain-level trace against a connection assignment per object.

    Every string contributes sums over curvature insertions; insertions
    beyond the scheme dimension vanish because each curvature factor carries
    at least one form degree.
    """
    cat = x.category
    assert isinstance(cat, GeometricCategory), "trace needs geometric chains"
    scheme = cat.scheme
    trunc = x.u_truncation
    jmax = scheme.dimension
    power_cache = {}
    bracket_cache = {}

    def powers_of(P):
        c = power_cache.get(id(P))
        if c is None:
            conn = connections.get(P)
            if conn is None:
                raise ValueError("missing connection for an object of the chain")
            c = _curvature_powers(P, conn, trunc, jmax)
            power_cache[id(P)] = c
        return c

    def bracket_of(a):
        c = bracket_cache.get(id(a))
        if c is None:
            src = connections.get(a.source)
            tgt = connections.get(a.target)
            if src is None or tgt is None:
                raise ValueError("missing connection for an object of the chain")
            c = nabla_bracket(a.cochain, tgt, src)
            bracket_cache[id(a)] = c
        return c

    out = CechCochain.scalar(scheme, {}, trunc)
    for (u_pow, a0, slots) in x.items():
        n = len(slots)
        sources = [a0.source] + [s.source for s in slots]
        brackets = [bracket_of(s) for s in slots]
        contribution = CechCochain.scalar(scheme, {}, trunc)
        for jvec in _j_vectors(n + 1, jmax):
            J = sum(jvec)
            acc = None
            if jvec[n]:
                acc = powers_of(sources[n])[jvec[n]]
            for i in range(n, 0, -1):
                acc = brackets[i - 1] if acc is None else acw_product(
                    brackets[i - 1], acc
                )
                if jvec[i - 1]:
                    acc = acw_product(powers_of(sources[i - 1])[jvec[i - 1]], acc)
            composite = a0.cochain if acc is None else acw_product(a0.cochain, acc)
            if composite.is_zero():
                continue
            term = supertrace(composite).scale(
                Fraction((-1) ** (J % 2), factorial(n + J))
            )
            contribution = contribution + term
        out = out + contribution.shift_u(u_pow)
    return out


# -- retract chains -----------------------------------------------------------


def eta_pi(r, u_truncation, tensor_cap=None):
    """The idempotent cycle: pi plus the alternating double-factorial tail
    on (2 pi - 1)."""
    cat = GeometricCategory(r.N.scheme, u_truncation)
    if tensor_cap is None:
        # one slot of headroom so B can still be applied at the top weight
        tensor_cap = 2 * u_truncation + 1
    two_pi_minus_one = r.pi.scale(2) - MorphismCochain.identity(r.N, u_truncation)
    items = [(1, 0, r.pi, ())]
    for i in range(1, u_truncation + 1):
        if 2 * i > tensor_cap:
            break
        coeff = Fraction((-1) ** i * factorial(2 * i), 2 * factorial(i))
        items.append((coeff, i, two_pi_minus_one, (r.pi,) * (2 * i)))
    return HochschildChain(cat, u_truncation, tensor_cap, items)


def _formal_eta_coefficient(i):
    coeff = Fraction((-1) ** i * factorial(2 * i), 2 * factorial(i))
    a0 = FormalMorphism("N", "N", {"pi": Fraction(2), "1N": Fraction(-1)})
    return coeff, a0


def xi_sequence(i, u_truncation=0, tensor_cap=None):
    """The degree 2i-1 comparison chains of the retract category."""
    assert i >= 1
    cat = RetractCategory()
    if tensor_cap is None:
        tensor_cap = 2 * i + 1
    g = FormalMorphism.basis("g")
    f = FormalMorphism.basis("f")
    pi = FormalMorphism.basis("pi")
    one_n = FormalMorphism.basis("1N")
    lead = Fraction(factorial(i - 1) * (-1) ** (i - 1))
    items = [(lead, 0, g, (f,) + (g, f) * (i - 1))]
    for j in range(1, i):
        items.append((-lead, 0, one_n, (pi,) * (2 * j - 1) + (g, f) * (i - j)))
    return HochschildChain(cat, u_truncation, tensor_cap, items)


def _formal_monomials(x):
    for (u_pow, a0, slots) in x.items():
        names = []
        slot_scale = Fraction(1)
        for s in slots:
            assert len(s.coeffs) == 1, "slots must be single basis arrows here"
            (name, c), = s.coeffs.items()
            slot_scale *= c
            names.append(name)
        for name0, c0 in sorted(a0.coeffs.items()):
            yield (u_pow, (name0,) + tuple(names), c0 * slot_scale)


def _merged_monomials(x):
    out = {}
    for (u_pow, names, c) in _formal_monomials(x):
        key = (u_pow, names)
        out[key] = out.get(key, Fraction(0)) + c
    return {k: v for k, v in out.items() if v != 0}


def _in_pi_span(names):
    return names[0] in ("pi", "1N") and all(nm == "pi" for nm in names[1:])


def _has_cyclic_f_pi(names):
    n = len(names)
    return any(
        names[i] == "f" and names[(i + 1) % n] == "pi" for i in range(n)
    )


def xi_recursion_check(i_max):
    """Verify b(xi_{i+1}) = eta_i - B(xi_i) modulo the two spanning
    subspaces, and b(xi_{i+1}) = -B(xi_i) in the double quotient."""
    from .mf import MFReport

    assert i_max >= 1
    failures = []
    for i in range(1, i_max + 1):
        cap = 2 * (i + 1) + 1
        xi_i = xi_sequence(i, tensor_cap=cap)
        xi_next = xi_sequence(i + 1, tensor_cap=cap)
        coeff, eta_a0 = _formal_eta_coefficient(i)
        cat = xi_i.category
        eta_i = HochschildChain(
            cat, 0, cap, [(coeff, 0, eta_a0, (FormalMorphism.basis("pi"),) * (2 * i))]
        )
        resid = hochschild_b(xi_next) - eta_i + connes_B(xi_i)
        for (_m, names), c in sorted(_merged_monomials(resid).items()):
            if _in_pi_span(names) or _has_cyclic_f_pi(names):
                continue
            failures.append(
                f"i={i}: residual monomial {names} with coefficient {c}"
            )
        quotient = hochschild_b(xi_next) + connes_B(xi_i)
        for (_m, names), c in sorted(_merged_monomials(quotient).items()):
            if _in_pi_span(names) or _has_cyclic_f_pi(names):
                continue
            failures.append(f"i={i}: double quotient keeps {names} -> {c}")
    return MFReport(failures)
