import random
from fractions import Fraction

from mfchern.forms import DifferentialForm, de_rham_d, pullback, wedge
from mfchern.rings import Ring, RingMap, ScalarPoly

from .test_rings import punctured_line, random_frac


def plane():
    return Ring("A2", ("x", "y"))


def random_form(rng, ring, max_deg=None):
    if max_deg is None:
        max_deg = len(ring.vars)
    nvars = len(ring.vars)
    out = DifferentialForm.zero(ring)
    for _ in range(rng.randint(1, 3)):
        k = rng.randint(0, max_deg)
        idxs = tuple(sorted(rng.sample(range(nvars), k)))
        out = out + DifferentialForm(ring, {idxs: random_frac(rng, ring)})
    return out


def test_d_of_inverse_coordinate():
    U = punctured_line()
    z = U.var("z")
    d = de_rham_d(DifferentialForm.function(z ** -1))
    assert d == DifferentialForm.dx(U, 0, -(z ** -2))


def test_d_squared_zero_random():
    rng = random.Random(41)
    A = plane()
    for _ in range(25):
        w = random_form(rng, A)
        assert de_rham_d(de_rham_d(w)).is_zero()


def test_leibniz_random():
    rng = random.Random(42)
    A = plane()
    for _ in range(25):
        k = rng.randint(0, 2)
        a = random_form(rng, A, max_deg=0) if k == 0 else DifferentialForm(
            A, {tuple(sorted(rng.sample(range(2), k))): random_frac(rng, A)}
        )
        b = random_form(rng, A)
        lhs = de_rham_d(wedge(a, b))
        rhs = wedge(de_rham_d(a), b) + (-1) ** k * wedge(a, de_rham_d(b))
        assert lhs == rhs


def test_wedge_antisymmetry_and_truncation():
    A = plane()
    dx = DifferentialForm.dx(A, 0)
    dy = DifferentialForm.dx(A, 1)
    assert wedge(dx, dy) == -wedge(dy, dx)
    assert wedge(dx, dx).is_zero()
    top = wedge(dx, dy)
    assert wedge(top, dx).is_zero()
    assert top.homogeneous_degree() == 2


def test_pullback_commutes_with_d():
    rng = random.Random(43)
    U0 = punctured_line("U0")
    U1 = punctured_line("U1")
    phi = RingMap(U0, U1, (U1.var("z") ** -1,))
    for _ in range(20):
        w = random_form(rng, U0)
        assert pullback(phi, de_rham_d(w)) == de_rham_d(pullback(phi, w))


def test_pullback_multiplicative():
    rng = random.Random(44)
    U0 = punctured_line("U0")
    U1 = punctured_line("U1")
    phi = RingMap(U0, U1, (U1.var("z") ** -1,))
    for _ in range(20):
        a = random_form(rng, U0, max_deg=0)
        b = random_form(rng, U0)
        assert pullback(phi, wedge(a, b)) == wedge(pullback(phi, a), pullback(phi, b))


def test_pullback_of_dlog_is_minus_dlog():
    # z -> 1/z sends dz/z to -dz/z
    U0 = punctured_line("U0")
    U1 = punctured_line("U1")
    phi = RingMap(U0, U1, (U1.var("z") ** -1,))
    dlog = DifferentialForm.dx(U0, 0, U0.var("z") ** -1)
    assert pullback(phi, dlog) == DifferentialForm.dx(U1, 0, -(U1.var("z") ** -1))


def test_degree_part_split():
    A = plane()
    w = DifferentialForm.function(A.var("x")) + DifferentialForm.dx(A, 1)
    assert w.homogeneous_degree() is None
    assert w.degree_part(0) == DifferentialForm.function(A.var("x"))
    assert w.degree_part(1) == DifferentialForm.dx(A, 1)
