"""Total complex of scalar Cech cochains: degree bookkeeping, the full
differential, primitive solving, and conjugation averaging of families."""

from fractions import Fraction

from .rings import LocalFrac, QLinearSystem, ScalarPoly, monomials_up_to
from .cech import (
    CechCochain,
    MatrixForm,
    cech_differential,
    form_derivative,
    acw_product,
    pullback_matrix,
)

__all__ = [
    "TotalCochain",
    "total_differential",
    "is_cocycle",
    "cohomologous",
    "coinvariant_project",
]


class TotalCochain:
    """A scalar-valued cochain with (Cech p, form q, u-power m) bookkeeping.

    Total degree is p - q + 2m: the exterior derivative has degree -1, u has
    degree 2, and the Cech direction has degree +1.  Only the parity of the
    total degree is homogeneous for the cochains produced by trace maps, so
    degree queries return sets.
    """

    __slots__ = ("cochain", "scheme")

    def __init__(self, cochain):
        assert isinstance(cochain, CechCochain)
        assert cochain.source.parities() == (0,), "total cochains are scalar-valued"
        assert cochain.target.parities() == (0,)
        self.cochain = cochain
        self.scheme = cochain.scheme

    @classmethod
    def zero(cls, scheme, u_truncation):
        return cls(CechCochain.scalar(scheme, {}, u_truncation))

    def components(self):
        out = set()
        for tup, mf in self.cochain.entries.items():
            for (_r, _c, idxs, m) in mf.terms:
                out.add((len(tup) - 1, len(idxs), m))
        return sorted(out)

    def total_degrees(self):
        return sorted({p - q + 2 * m for (p, q, m) in self.components()})

    def total_parity(self):
        return self.cochain.homogeneous_total_parity()

    def is_zero(self):
        return self.cochain.is_zero()

    def __add__(self, other):
        assert isinstance(other, TotalCochain)
        return TotalCochain(self.cochain + other.cochain)

    def __neg__(self):
        return TotalCochain(-self.cochain)

    def __sub__(self, other):
        assert isinstance(other, TotalCochain)
        return TotalCochain(self.cochain - other.cochain)

    def scale(self, scalar):
        return TotalCochain(self.cochain.scale(scalar))

    def shift_u(self, k):
        return TotalCochain(self.cochain.shift_u(k))

    def __eq__(self, other):
        if not isinstance(other, TotalCochain):
            return NotImplemented
        return self.cochain == other.cochain

    def canonical_string(self):
        return self.cochain.canonical_string()

    def __str__(self):
        return str(self.cochain)


def _minus_dw_cochain(scheme, u_truncation):
    entries = {}
    for (i,) in scheme.tuples(1):
        ring = scheme.intersection((i,)).ring
        w = scheme.potential(i)
        terms = {}
        for j in range(len(ring.vars)):
            dj = w.partial(j)
            if not dj.is_zero():
                terms[(0, 0, (j,), 0)] = -dj
        if terms:
            entries[(i,)] = MatrixForm(ring, (0,), (0,), terms)
    return CechCochain.scalar(scheme, entries, u_truncation)


def total_differential(c):
    """The full differential d_Cech + u d - dw on scalar cochains.

    The -dw summand is graded left multiplication by the odd element -dw,
    realized as a cup product with the degree-zero Cech cochain of patchwise
    potential differentials.
    """
    tc = c if isinstance(c, TotalCochain) else TotalCochain(c)
    cochain = tc.cochain
    out = cech_differential(cochain)
    out = out + form_derivative(cochain).shift_u(1)
    dw = _minus_dw_cochain(tc.scheme, cochain.u_truncation)
    if not dw.is_zero():
        out = out + acw_product(dw, cochain)
    result = TotalCochain(out)
    return result if isinstance(c, TotalCochain) else result.cochain


def is_cocycle(c):
    return total_differential(c).is_zero()


def _expand_rows(contributions, rhs_values, system):
    """Clear denominators per coordinate group and match monomials.

    contributions: {(tup, idxs, m): [(column index, LocalFrac)]}
    rhs_values: {(tup, idxs, m): LocalFrac}
    """
    keys = set(contributions) | set(rhs_values)
    for key in sorted(keys):
        ring = None
        parts = contributions.get(key, [])
        rhs = rhs_values.get(key)
        dens = [p.den for _col, p in parts]
        if rhs is not None:
            dens.append(rhs.den)
            ring = rhs.ring
        elif parts:
            ring = parts[0][1].ring
        if ring is None:
            continue
        ngen = len(ring.denominators)
        common = tuple(max(d[j] for d in dens) for j in range(ngen)) if dens else (0,) * ngen
        rows = {}

        def put(col, value):
            lift = value.num * ring.den_power(
                tuple(c - a for c, a in zip(common, value.den))
            )
            for exps, q in lift.terms.items():
                rows.setdefault(exps, {})
                if col is None:
                    rows[exps]["rhs"] = rows[exps].get("rhs", Fraction(0)) + q
                else:
                    rows[exps][col] = rows[exps].get(col, Fraction(0)) + q

        for col, value in parts:
            put(col, value)
        if rhs is not None:
            put(None, rhs)
        for exps in sorted(rows):
            data = rows[exps]
            rhs_q = data.pop("rhs", Fraction(0))
            system.add_row(data, rhs_q)


def cohomologous(c1, c2, degree_bound, den_bound=1):
    """Search for a primitive p with total_differential(p) = c1 - c2.

    The primitive is sought with polynomial numerators of degree at most
    degree_bound and denominator multiplicities at most den_bound; a found
    primitive is verified by substitution before being returned.  None means
    undecided within the bound, not a proof of inequality.
    """
    t1 = c1 if isinstance(c1, TotalCochain) else TotalCochain(c1)
    t2 = c2 if isinstance(c2, TotalCochain) else TotalCochain(c2)
    assert t1.scheme is t2.scheme, "cochains live on different schemes"
    diff = t1 - t2
    scheme = t1.scheme
    trunc = diff.cochain.u_truncation
    if diff.is_zero():
        return TotalCochain.zero(scheme, trunc)
    parity = diff.total_parity()
    p1, p2 = t1.total_parity(), t2.total_parity()
    if parity is None or (p1 is not None and p2 is not None and p1 != p2):
        raise ValueError("total degree mismatch between the two cocycles")
    target_parity = (parity + 1) % 2

    columns = []
    for size in range(1, scheme.npatches() + 1):
        for tup in scheme.tuples(size):
            ring = scheme.intersection(tup).ring
            nvars = len(ring.vars)
            for idxs in _subsets(nvars):
                for m in range(trunc + 1):
                    if (size - 1 + len(idxs)) % 2 != target_parity:
                        continue
                    for den in monomials_up_to(len(ring.denominators), den_bound):
                        for mono in monomials_up_to(nvars, degree_bound):
                            value = LocalFrac(
                                ring, ScalarPoly(ring.vars, {mono: Fraction(1)}), den
                            )
                            if value.den != tuple(den) or value.num.terms != {
                                tuple(mono): Fraction(1)
                            }:
                                continue
                            columns.append((tup, idxs, m, value))

    contributions = {}
    for col, (tup, idxs, m, value) in enumerate(columns):
        ring = value.ring
        elem = CechCochain.scalar(
            scheme, {tup: MatrixForm(ring, (0,), (0,), {(0, 0, idxs, m): value})}, trunc
        )
        image = total_differential(elem)
        for out_tup, mf in image.entries.items():
            for (r, c, out_idxs, out_m), f in mf.terms.items():
                contributions.setdefault((out_tup, out_idxs, out_m), []).append((col, f))

    rhs_values = {}
    for tup, mf in diff.cochain.entries.items():
        for (r, c, idxs, m), f in mf.terms.items():
            key = (tup, idxs, m)
            rhs_values[key] = rhs_values.get(key, f.ring.zero()) + f

    system = QLinearSystem()
    _expand_rows(contributions, rhs_values, system)
    solution = system.solve(len(columns))
    if solution is None:
        return None

    entries = {}
    for coeff, (tup, idxs, m, value) in zip(solution, columns):
        if coeff == 0:
            continue
        ring = value.ring
        add = MatrixForm(ring, (0,), (0,), {(0, 0, idxs, m): value * coeff})
        entries[tup] = entries[tup] + add if tup in entries else add
    primitive = TotalCochain(
        CechCochain.scalar(scheme, {t: v for t, v in entries.items()}, trunc)
    )
    if total_differential(primitive) == diff:
        return primitive
    return None


def _subsets(n):
    out = [()]
    for j in range(n):
        out = out + [s + (j,) for s in out]
    return sorted(out, key=lambda s: (len(s), s))


def _transported(scheme, cochain, h):
    entries = {}
    for tup, mf in cochain.entries.items():
        rm = scheme.action_on(tup, h)
        entries[tup] = pullback_matrix(rm, mf)
    return CechCochain.scalar(scheme, entries, cochain.u_truncation)


def coinvariant_project(family, scheme):
    """Average a per-group-element family over conjugation orbits.

    family: {g: TotalCochain or CechCochain}; missing components are zero.
    The component at g becomes the orbit average of the components at all
    h g h^{-1}, each pulled back along a fixed h realizing the conjugation.
    For abelian groups every orbit is a singleton realized by the identity,
    so the projection is the identity map.
    """
    act = scheme.action
    assert act is not None, "scheme carries no group action"
    trunc = None
    cochains = {}
    for g, c in family.items():
        cc = c.cochain if isinstance(c, TotalCochain) else c
        assert cc.scheme is scheme
        cochains[g] = cc
        trunc = cc.u_truncation if trunc is None else min(trunc, cc.u_truncation)
    if trunc is None:
        trunc = 0

    def conj(h, g):
        return act.mult(act.mult(h, g), act.inverse(h))

    out = {}
    for g in act.elements:
        orbit = []
        for gp in act.elements:
            movers = [h for h in act.elements if conj(h, gp) == g]
            if movers:
                pick = act.identity if act.identity in movers else movers[0]
                orbit.append((gp, pick))
        acc = CechCochain.scalar(scheme, {}, trunc)
        for gp, h in orbit:
            c = cochains.get(gp)
            if c is None or c.is_zero():
                continue
            acc = acc + _transported(scheme, c.truncate_u(trunc), h)
        out[g] = TotalCochain(acc.scale(Fraction(1, len(orbit))))
    return out
