"""Ordered Cech cochains valued in forms tensor endomorphisms tensor u-powers.

Every sign in this module and its clients comes from exactly three rules,
implemented once below: the Koszul transposition sign, the front-face sign
(-1)^{p|y|} of the cup product, and the value-level sign (-1)^{|k1||g2|} for
composing form-valued endomorphisms.  u is even and never contributes.
"""

from __future__ import annotations

from fractions import Fraction

from .forms import DifferentialForm, de_rham_d, merge_indices, pullback
from .rings import LocalFrac

__all__ = [
    "MatrixForm",
    "CechCochain",
    "TrivialLine",
    "cech_differential",
    "form_derivative",
    "acw_product",
    "exp_neg",
    "supertrace",
    "identity_cochain",
    "koszul_sign",
    "product_sign",
    "differential_sign",
]


# -- the sign ledger --------------------------------------------------------


def koszul_sign(deg_a, deg_b):
    """Rule 1: transposing objects of the given total degrees."""
    return -1 if (deg_a * deg_b) % 2 else 1


def product_sign(cech_left, endo_left, form_right, endo_right):
    """Rules 2 and 3 composed: the sign of (x tensor a).(y tensor b).

    Rule 2 moves the degree-p Cech position of the left factor past the
    internal value y of the right factor; rule 3 moves the endomorphism part
    of the left value past the form part of the right value.
    """
    exponent = cech_left * (form_right + endo_right) + endo_left * form_right
    return -1 if exponent % 2 else 1


def differential_sign(form_deg, endo_parity):
    """Rule 1 applied to the degree-1 Cech differential passing the value."""
    return koszul_sign(form_deg + endo_parity, 1)


# -- matrix-of-forms values --------------------------------------------------


class MatrixForm:
    """A matrix over (differential forms) x (powers of u) in one ring.

    Rows and columns carry parities from the target and source bundle
    generators; terms map (row, col, dx index tuple, u power) to LocalFrac.
    """

    __slots__ = ("ring", "row_parities", "col_parities", "terms")

    def __init__(self, ring, row_parities, col_parities, terms):
        self.ring = ring
        self.row_parities = tuple(row_parities)
        self.col_parities = tuple(col_parities)
        assert all(p in (0, 1) for p in self.row_parities + self.col_parities)
        nvars = len(ring.vars)
        clean = {}
        for (r, c, idxs, m), f in terms.items():
            idxs = tuple(idxs)
            assert 0 <= r < len(self.row_parities), f"row {r} out of range"
            assert 0 <= c < len(self.col_parities), f"col {c} out of range"
            assert m >= 0
            assert all(0 <= i < nvars for i in idxs)
            assert all(a < b for a, b in zip(idxs, idxs[1:]))
            assert isinstance(f, LocalFrac) and f.ring.name == ring.name
            if f.is_zero():
                continue
            key = (r, c, idxs, m)
            if key in clean:
                clean[key] = clean[key] + f
                if clean[key].is_zero():
                    del clean[key]
            else:
                clean[key] = f
        self.terms = clean

    @classmethod
    def zero(cls, ring, row_parities, col_parities):
        return cls(ring, row_parities, col_parities, {})

    @classmethod
    def identity(cls, ring, parities):
        one = ring.one()
        return cls(
            ring,
            parities,
            parities,
            {(k, k, (), 0): one for k in range(len(parities))},
        )

    @classmethod
    def from_entries(cls, ring, row_parities, col_parities, matrix, u_power=0):
        """Build a form-degree-zero value from a dense list of LocalFrac rows."""
        terms = {}
        for r, row in enumerate(matrix):
            for c, f in enumerate(row):
                if isinstance(f, (int, Fraction)):
                    f = ring.const(f)
                if not f.is_zero():
                    terms[(r, c, (), u_power)] = f
        return cls(ring, row_parities, col_parities, terms)

    def is_zero(self):
        return not self.terms

    def shape(self):
        return len(self.row_parities), len(self.col_parities)

    def term_endo_parity(self, key):
        r, c, _, _ = key
        return (self.row_parities[r] + self.col_parities[c]) % 2

    def term_total_parity(self, key):
        return (len(key[2]) + self.term_endo_parity(key)) % 2

    def homogeneous_total_parity(self):
        parities = {self.term_total_parity(k) for k in self.terms}
        if len(parities) == 1:
            return parities.pop()
        return None

    def __add__(self, other):
        assert isinstance(other, MatrixForm)
        assert other.ring.name == self.ring.name
        assert other.row_parities == self.row_parities
        assert other.col_parities == self.col_parities
        terms = dict(self.terms)
        for k, f in other.terms.items():
            terms[k] = terms[k] + f if k in terms else f
        return MatrixForm(self.ring, self.row_parities, self.col_parities, terms)

    def __neg__(self):
        return MatrixForm(
            self.ring,
            self.row_parities,
            self.col_parities,
            {k: -f for k, f in self.terms.items()},
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        """Multiply every term by a function (degree-zero scalar), no signs."""
        if isinstance(scalar, (int, Fraction)):
            scalar = self.ring.const(scalar)
        return MatrixForm(
            self.ring,
            self.row_parities,
            self.col_parities,
            {k: f * scalar for k, f in self.terms.items()},
        )

    def shift_u(self, k):
        return MatrixForm(
            self.ring,
            self.row_parities,
            self.col_parities,
            {(r, c, idxs, m + k): f for (r, c, idxs, m), f in self.terms.items()},
        )

    def truncate_u(self, bound):
        return MatrixForm(
            self.ring,
            self.row_parities,
            self.col_parities,
            {k: f for k, f in self.terms.items() if k[3] <= bound},
        )

    def u_component(self, m):
        return MatrixForm(
            self.ring,
            self.row_parities,
            self.col_parities,
            {k: f for k, f in self.terms.items() if k[3] == m},
        )

    def mul(self, other, cech_left=0):
        """Compose: self acting after other, with the ledger signs.

        cech_left is the Cech degree of the cochain the left factor came
        from; it feeds rule 2.
        """
        assert isinstance(other, MatrixForm)
        assert other.ring.name == self.ring.name, (
            f"cannot compose values over {self.ring.name} and {other.ring.name}"
        )
        assert self.col_parities == other.row_parities, "shape mismatch"
        terms = {}
        for (r1, c1, i1, m1), f1 in self.terms.items():
            e1 = (self.row_parities[r1] + self.col_parities[c1]) % 2
            for (r2, c2, i2, m2), f2 in other.terms.items():
                if c1 != r2:
                    continue
                wsign, merged = merge_indices(i1, i2)
                if wsign == 0:
                    continue
                e2 = (other.row_parities[r2] + other.col_parities[c2]) % 2
                sign = wsign * product_sign(cech_left, e1, len(i2), e2)
                key = (r1, c2, merged, m1 + m2)
                val = f1 * f2 * sign
                terms[key] = terms[key] + val if key in terms else val
        return MatrixForm(self.ring, self.row_parities, other.col_parities, terms)

    def d_form(self):
        """Exterior derivative on the form factor; it sits leftmost, no sign."""
        terms = {}
        for (r, c, idxs, m), f in self.terms.items():
            dform = de_rham_d(DifferentialForm(self.ring, {idxs: f}))
            for nidxs, nf in dform.terms.items():
                key = (r, c, nidxs, m)
                terms[key] = terms[key] + nf if key in terms else nf
        return MatrixForm(self.ring, self.row_parities, self.col_parities, terms)

    def supertrace(self):
        """Scalar value (-1)^{|row|} times the diagonal sum."""
        assert self.row_parities == self.col_parities, "supertrace needs square shape"
        terms = {}
        for (r, c, idxs, m), f in self.terms.items():
            if r != c:
                continue
            val = f if self.row_parities[r] == 0 else -f
            key = (0, 0, idxs, m)
            terms[key] = terms[key] + val if key in terms else val
        return MatrixForm(self.ring, (0,), (0,), terms)

    def __eq__(self, other):
        assert isinstance(other, MatrixForm)
        if (
            self.ring.name != other.ring.name
            or self.row_parities != other.row_parities
            or self.col_parities != other.col_parities
        ):
            return False
        if set(self.terms) != set(other.terms):
            return False
        return all(self.terms[k] == other.terms[k] for k in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        lines = []
        for key in sorted(self.terms, key=lambda k: (k[3], k[0], k[1], k[2])):
            r, c, idxs, m = key
            dx = "".join(f"^d{self.ring.vars[i]}" for i in idxs)
            upart = "" if m == 0 else f"u^{m} " if m > 1 else "u "
            lines.append(f"[{r},{c}] {upart}{dx[1:] if dx else '1'} :: {self.terms[key]}")
        return "; ".join(lines)

    __repr__ = __str__


def pullback_matrix(ring_map, value, row_parities=None, col_parities=None):
    """Move a MatrixForm along a RingMap, pulling back both the coefficients
    and the dx factors."""
    rows = value.row_parities if row_parities is None else row_parities
    cols = value.col_parities if col_parities is None else col_parities
    assert value.ring.name == ring_map.source.name
    target = ring_map.target
    terms = {}
    for (r, c, idxs, m), f in value.terms.items():
        moved = pullback(ring_map, DifferentialForm(value.ring, {idxs: f}))
        for nidxs, nf in moved.terms.items():
            key = (r, c, nidxs, m)
            terms[key] = terms[key] + nf if key in terms else nf
    return MatrixForm(target, rows, cols, terms)


# -- bundle stand-in for scalar-valued cochains ------------------------------


class TrivialLine:
    """The trivial even line bundle; scalar cochains are valued in its
    endomorphisms."""

    def parities(self):
        return (0,)

    def transition(self, scheme, ring, i, j):
        return MatrixForm.identity(ring, (0,))

    def transition_inverse(self, scheme, ring, i, j):
        return MatrixForm.identity(ring, (0,))

    def __repr__(self):
        return "TrivialLine"


TRIVIAL_LINE = TrivialLine()


# -- cochains ----------------------------------------------------------------


class CechCochain:
    """Entries at nonempty strictly increasing patch tuples, in the tuple's
    smallest-index coordinates and frames."""

    __slots__ = ("scheme", "source", "target", "entries", "u_truncation")

    def __init__(self, scheme, source, target, entries, u_truncation):
        self.scheme = scheme
        self.source = source
        self.target = target
        self.u_truncation = u_truncation
        clean = {}
        rows = target.parities()
        cols = source.parities()
        for tup, mf in entries.items():
            tup = tuple(tup)
            assert scheme.is_nonempty(tup), f"entry at empty intersection {tup}"
            assert isinstance(mf, MatrixForm)
            assert mf.ring.name == scheme.intersection(tup).ring.name, (
                f"entry at {tup} lives in {mf.ring.name}"
            )
            assert mf.row_parities == rows and mf.col_parities == cols, (
                f"entry at {tup} has wrong shape for the declared bundles"
            )
            assert all(k[3] <= u_truncation for k in mf.terms), (
                f"u-power above truncation at {tup}"
            )
            if not mf.is_zero():
                clean[tup] = mf
        self.entries = clean

    @classmethod
    def scalar(cls, scheme, entries, u_truncation):
        return cls(scheme, TRIVIAL_LINE, TRIVIAL_LINE, entries, u_truncation)

    def entry(self, tup):
        return self.entries.get(tuple(tup))

    def is_zero(self):
        return not self.entries

    def cech_degrees(self):
        return sorted({len(t) - 1 for t in self.entries})

    def homogeneous_total_parity(self):
        """Total parity (Cech + form + endomorphism) when well-defined."""
        parities = set()
        for tup, mf in self.entries.items():
            for k in mf.terms:
                parities.add((len(tup) - 1 + mf.term_total_parity(k)) % 2)
        if len(parities) == 1:
            return parities.pop()
        return None

    def _compatible(self, other):
        assert isinstance(other, CechCochain)
        assert other.scheme is self.scheme
        assert other.source.parities() == self.source.parities()
        assert other.target.parities() == self.target.parities()

    def __add__(self, other):
        self._compatible(other)
        trunc = min(self.u_truncation, other.u_truncation)
        entries = {t: mf.truncate_u(trunc) for t, mf in self.entries.items()}
        for t, mf in other.entries.items():
            mf = mf.truncate_u(trunc)
            entries[t] = entries[t] + mf if t in entries else mf
        return CechCochain(self.scheme, self.source, self.target, entries, trunc)

    def __neg__(self):
        return CechCochain(
            self.scheme,
            self.source,
            self.target,
            {t: -mf for t, mf in self.entries.items()},
            self.u_truncation,
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        return CechCochain(
            self.scheme,
            self.source,
            self.target,
            {t: mf.scale(scalar) for t, mf in self.entries.items()},
            self.u_truncation,
        )

    def shift_u(self, k):
        entries = {}
        for t, mf in self.entries.items():
            moved = mf.shift_u(k).truncate_u(self.u_truncation)
            if not moved.is_zero():
                entries[t] = moved
        return CechCochain(
            self.scheme, self.source, self.target, entries, self.u_truncation
        )

    def truncate_u(self, bound):
        entries = {}
        for t, mf in self.entries.items():
            cut = mf.truncate_u(bound)
            if not cut.is_zero():
                entries[t] = cut
        return CechCochain(self.scheme, self.source, self.target, entries, bound)

    def u_component(self, m):
        entries = {}
        for t, mf in self.entries.items():
            part = mf.u_component(m)
            if not part.is_zero():
                entries[t] = part
        return CechCochain(
            self.scheme, self.source, self.target, entries, self.u_truncation
        )

    def __eq__(self, other):
        self._compatible(other)
        if set(self.entries) != set(other.entries):
            return False
        return all(self.entries[t] == other.entries[t] for t in self.entries)

    def transport(self, small, big, value=None):
        """Move the entry at the small tuple into the big tuple's ring and
        frame: pull back coefficients and forms, then change frames by the
        bundle transitions when the leading index changes."""
        small, big = tuple(small), tuple(big)
        if value is None:
            value = self.entries[small]
        if small == big:
            return value
        rm = self.scheme.restriction(small, big)
        moved = pullback_matrix(rm, value)
        if small[0] != big[0]:
            ring = self.scheme.intersection(big).ring
            g_t = self.target.transition(self.scheme, ring, big[0], small[0])
            g_s = self.source.transition_inverse(self.scheme, ring, big[0], small[0])
            moved = g_t.mul(moved).mul(g_s)
        return moved

    def canonical_string(self):
        lines = []
        for tup in sorted(self.entries):
            mf = self.entries[tup]
            for key in sorted(mf.terms, key=lambda k: (k[3], k[2], k[0], k[1])):
                r, c, idxs, m = key
                dx = "^".join(f"d{mf.ring.vars[i]}" for i in idxs) or "1"
                lines.append(
                    f"{tup} u^{m} {dx} [{r},{c}] = {mf.terms[key]}"
                )
        return "\n".join(lines) if lines else "0"

    def __str__(self):
        return self.canonical_string()

    __repr__ = __str__


def identity_cochain(scheme, bundle, u_truncation):
    entries = {}
    for (i,) in scheme.tuples(1):
        ring = scheme.intersection((i,)).ring
        entries[(i,)] = MatrixForm.identity(ring, bundle.parities())
    return CechCochain(scheme, bundle, bundle, entries, u_truncation)


def cech_differential(c):
    """Alternating sum of transports, with the rule-1 sign for passing the
    degree-1 Cech operation through each term's internal value."""
    assert isinstance(c, CechCochain)
    scheme = c.scheme
    out = {}
    sizes = {len(t) + 1 for t in c.entries}
    for size in sizes:
        for big in scheme.tuples(size):
            ring = scheme.intersection(big).ring
            acc = None
            for k in range(size):
                small = big[:k] + big[k + 1 :]
                value = c.entries.get(small)
                if value is None:
                    continue
                signed = MatrixForm(
                    value.ring,
                    value.row_parities,
                    value.col_parities,
                    {
                        key: f * ((-1) ** k) * differential_sign(len(key[2]),
                                                                 value.term_endo_parity(key))
                        for key, f in value.terms.items()
                    },
                )
                moved = c.transport(small, big, signed)
                acc = moved if acc is None else acc + moved
            if acc is not None and not acc.is_zero():
                out[big] = acc
    return CechCochain(scheme, c.source, c.target, out, c.u_truncation)


def form_derivative(c):
    """Entrywise exterior derivative in each tuple's leading frame."""
    assert isinstance(c, CechCochain)
    entries = {}
    for tup, mf in c.entries.items():
        d = mf.d_form()
        if not d.is_zero():
            entries[tup] = d
    return CechCochain(c.scheme, c.source, c.target, entries, c.u_truncation)


def acw_product(a, b):
    """Front-face/back-face cup product; a composes after b on values."""
    assert isinstance(a, CechCochain) and isinstance(b, CechCochain)
    assert a.scheme is b.scheme
    assert b.target.parities() == a.source.parities(), (
        "product needs target bundle of the right factor = source of the left"
    )
    scheme = a.scheme
    trunc = min(a.u_truncation, b.u_truncation)
    out = {}
    by_size_a = {}
    for t in a.entries:
        by_size_a.setdefault(len(t), set()).add(t)
    by_size_b = {}
    for t in b.entries:
        by_size_b.setdefault(len(t), set()).add(t)
    for size_a, fronts in by_size_a.items():
        for size_b, backs in by_size_b.items():
            size = size_a + size_b - 1
            for big in scheme.tuples(size):
                front = big[: size_a]
                back = big[size_a - 1 :]
                if front not in fronts or back not in backs:
                    continue
                left = a.transport(front, big)
                right = b.transport(back, big)
                value = left.mul(right, cech_left=size_a - 1).truncate_u(trunc)
                if value.is_zero():
                    continue
                out[big] = out[big] + value if big in out else value
    out = {t: v for t, v in out.items() if not v.is_zero()}
    return CechCochain(scheme, b.source, a.target, out, trunc)


def exp_neg(c):
    """Sum of (-1)^m c^m / m! under the cup product, for nilpotent c."""
    assert isinstance(c, CechCochain)
    assert c.source.parities() == c.target.parities(), "exp needs square values"
    scheme = c.scheme
    out = identity_cochain(scheme, c.source, c.u_truncation)
    power = out
    bound = scheme.dimension + scheme.npatches() + 1
    m = 0
    coeff = Fraction(1)
    while True:
        m += 1
        power = acw_product(power, c)
        if power.is_zero():
            break
        if m > bound:
            raise ValueError(
                f"input not nilpotent: nonzero {m}-th power on a scheme of "
                f"dimension {scheme.dimension}"
            )
        coeff = coeff * Fraction(-1, m)
        out = out + power.scale(coeff)
    return out


def supertrace(c):
    """Entrywise supertrace, producing a scalar-valued cochain."""
    assert isinstance(c, CechCochain)
    assert c.source.parities() == c.target.parities(), "supertrace needs square values"
    entries = {}
    for tup, mf in c.entries.items():
        tr = mf.supertrace()
        if not tr.is_zero():
            entries[tup] = tr
    return CechCochain.scalar(c.scheme, entries, c.u_truncation)
