import random

import pytest

from mfchern.cech import CechCochain, MatrixForm
from mfchern.geometry import build_scheme
from mfchern.mf import (
    EquivariantStructure,
    MatrixFactorization,
    MorphismCochain,
    RetractData,
    VectorBundle,
    check_mf,
    direct_sum,
    group_twist,
    hom_differential,
    invert_matrix,
    koszul_mf,
    shift,
    twist_by_character,
)
from mfchern.rings import Fraction, parse_scalar

from .test_cech import proj_line_three_patch, random_matrix_form
from .test_geometry import (
    affine_line_squared,
    proj_line,
    z2_on_proj_line,
    z2_reflection_on_line,
)
from .test_rings import plain_ring, punctured_line


def affine_plane(potential):
    return {
        "grading": "Z2",
        "dimension": 2,
        "patches": [{"name": "A2", "variables": ["x", "y"], "denominators": []}],
        "gluings": [],
        "potentials": [potential],
        "all_critical_values_zero": True,
    }


def section_mf_proj_line():
    # O + O(-1)[odd] with delta the section z of O(1): z on U0, 1 on U1
    cfg = proj_line()
    cfg["grading"] = "Z2"
    sch = build_scheme(cfg)
    r = sch.intersection((0, 1)).ring
    bundle = VectorBundle(
        sch,
        [0, 1],
        {(0, 1): [[r.one(), r.zero()], [r.zero(), r.var("z") ** -1]]},
    )
    return MatrixFactorization(bundle, [[[0, "z"], [0, 0]], [[0, 1], [0, 0]]])


def section_mf_three_patch():
    # same factorization over the redundant three-chart cover
    cfg = proj_line_three_patch()
    cfg["grading"] = "Z2"
    sch = build_scheme(cfg)

    def diag(pair, unit):
        r = sch.intersection(pair).ring
        return [[r.one(), r.zero()], [r.zero(), unit(r)]]

    bundle = VectorBundle(
        sch,
        [0, 1],
        {
            (0, 1): diag((0, 1), lambda r: r.var("z") ** -1),
            (0, 2): diag((0, 2), lambda r: r.one()),
            (1, 2): diag((1, 2), lambda r: r.var("w") ** -1),
        },
    )
    deltas = [[[0, "z"], [0, 0]], [[0, 1], [0, 0]], [[0, "v"], [0, 0]]]
    return MatrixFactorization(bundle, deltas)


def matrix_of(morphism, patch):
    mf = morphism.cochain.entry((patch,))
    rank_t = len(mf.row_parities)
    rank_s = len(mf.col_parities)
    ring = mf.ring
    out = [[ring.zero() for _ in range(rank_s)] for _ in range(rank_t)]
    for (r, c, idxs, u), f in mf.terms.items():
        assert idxs == () and u == 0
        out[r][c] = out[r][c] + f
    return out


def test_koszul_line_matrix_frozen():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    assert P.bundle.gradings == (0, 1)
    ring = sch.patch_ring(0)
    x = ring.var("x")
    assert P.deltas[0][0][0] == ring.zero()
    assert P.deltas[0][0][1] == x
    assert P.deltas[0][1][0] == x
    assert P.deltas[0][1][1] == ring.zero()
    assert check_mf(P).ok


def test_koszul_rejects_wrong_potential():
    sch = build_scheme(affine_line_squared())
    with pytest.raises(ValueError):
        koszul_mf(sch, [["x"]], [["1"]])


def test_koszul_two_variables_frozen():
    sch = build_scheme(affine_plane("x^2 + y^2"))
    P = koszul_mf(sch, [["x"], ["y"]], [["x"], ["y"]])
    assert P.bundle.gradings == (0, 1, 1, 0)
    ring = sch.patch_ring(0)
    x, y = ring.var("x"), ring.var("y")
    z = ring.zero()
    # basis order: (), (0,), (1,), (0,1)
    expected = [
        [z, x, y, z],
        [x, z, z, -y],
        [y, z, z, x],
        [z, -y, x, z],
    ]
    for r in range(4):
        for c in range(4):
            assert P.deltas[0][r][c] == expected[r][c], (r, c)
    assert check_mf(P).ok


def test_koszul_mixed_pair_on_plane():
    sch = build_scheme(affine_plane("x*y"))
    P = koszul_mf(sch, [["x"]], [["y"]])
    ring = sch.patch_ring(0)
    assert P.deltas[0][0][1] == ring.var("y")
    assert P.deltas[0][1][0] == ring.var("x")
    assert check_mf(P).ok


def test_check_mf_reports_delta_square_failure():
    sch = build_scheme(affine_line_squared())
    bundle = VectorBundle(sch, [0, 1], {})
    P = MatrixFactorization(bundle, [[[0, 1], ["x", 0]]])
    report = check_mf(P)
    assert not report.ok
    assert any("delta^2" in msg for msg in report.failures)


def test_check_mf_reports_overlap_failure():
    cfg = proj_line()
    cfg["grading"] = "Z2"
    sch = build_scheme(cfg)
    r = sch.intersection((0, 1)).ring
    bundle = VectorBundle(
        sch, [0, 1], {(0, 1): [[r.one(), r.zero()], [r.zero(), r.one()]]}
    )
    P = MatrixFactorization(bundle, [[[0, "z"], [0, 0]], [[0, 1], [0, 0]]])
    report = check_mf(P)
    assert not report.ok
    assert any("overlap (0,1)" in msg for msg in report.failures)
    # delta^2 = 0 = w holds patchwise, so only the overlap is reported
    assert all("delta^2" not in msg for msg in report.failures)


def test_line_bundle_on_proj_line_z_graded():
    sch = build_scheme(proj_line())
    r = sch.intersection((0, 1)).ring
    bundle = VectorBundle(sch, [0], {(0, 1): [[r.var("z") ** 2]]})
    P = MatrixFactorization(bundle, [[[0]], [[0]]])
    assert check_mf(P).ok
    assert bundle.parities() == (0,)


def test_transition_degree_zero_enforced():
    sch = build_scheme(proj_line())
    r = sch.intersection((0, 1)).ring
    with pytest.raises(AssertionError, match="degree 0"):
        VectorBundle(
            sch,
            [0, 1],
            {(0, 1): [[r.one(), r.var("z")], [r.zero(), r.one()]]},
        )


def test_wrong_declared_inverse_rejected():
    sch = build_scheme(proj_line())
    r = sch.intersection((0, 1)).ring
    z = r.var("z")
    with pytest.raises(AssertionError, match="inverse"):
        VectorBundle(sch, [0], {(0, 1): [[z]]}, inverses={(0, 1): [[z]]})


def test_missing_transition_rejected():
    sch = build_scheme(proj_line())
    with pytest.raises(AssertionError, match="missing transition"):
        VectorBundle(sch, [0], {})


def test_cocycle_failure_detected():
    sch = build_scheme(proj_line_three_patch())

    def entries(vals):
        out = {}
        for pair, text in vals.items():
            r = sch.intersection(pair).ring
            out[pair] = [[parse_scalar(r, text)]]
        return out

    good = entries({(0, 1): "z", (0, 2): "1", (1, 2): "w"})
    VectorBundle(sch, [0], good)
    bad = entries({(0, 1): "z", (0, 2): "1", (1, 2): "1"})
    with pytest.raises(AssertionError, match="cocycle"):
        VectorBundle(sch, [0], bad)


def test_delta_degree_enforced_z_graded():
    sch = build_scheme(proj_line())
    r = sch.intersection((0, 1)).ring
    bundle = VectorBundle(
        sch, [1, 0], {(0, 1): [[r.one(), r.zero()], [r.zero(), r.one()]]}
    )
    MatrixFactorization(bundle, [[[0, 1], [0, 0]], [[0, 1], [0, 0]]])
    with pytest.raises(AssertionError, match="degree 1"):
        MatrixFactorization(bundle, [[[0, 0], [1, 0]], [[0, 0], [1, 0]]])


def test_invert_matrix():
    ring = plain_ring(variables=("x",))
    x = ring.var("x")
    inv = invert_matrix(ring, [[ring.one(), x], [ring.zero(), ring.one()]])
    assert inv[0][0] == ring.one()
    assert inv[0][1] == -x
    assert inv[1][0] == ring.zero()
    assert inv[1][1] == ring.one()
    with pytest.raises(ValueError):
        invert_matrix(ring, [[x]])
    punct = punctured_line()
    z = punct.var("z")
    inv = invert_matrix(punct, [[z]])
    assert inv[0][0] == z ** -1


def test_identity_morphism_is_closed():
    P = section_mf_proj_line()
    one = MorphismCochain.identity(P, 1)
    assert one.parity() == 0
    assert hom_differential(one).is_zero()


def test_hom_differential_even_morphism_frozen():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    Q = koszul_mf(sch, [["x^2"]], [["1"]])
    ring = sch.patch_ring(0)
    x = ring.var("x")
    psi = MorphismCochain.from_entries(
        P,
        Q,
        {(0,): MatrixForm(ring, (0, 1), (0, 1), {(0, 0, (), 0): x, (1, 1, (), 0): ring.one()})},
        0,
    )
    d = hom_differential(psi)
    got = matrix_of(d, 0)
    # delta_Q psi - psi delta_P by hand
    assert got[0][0] == ring.zero()
    assert got[0][1] == ring.one() - x ** 2
    assert got[1][0] == x ** 3 - x
    assert got[1][1] == ring.zero()


def test_hom_differential_odd_morphism_frozen():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    Q = koszul_mf(sch, [["x^2"]], [["1"]])
    ring = sch.patch_ring(0)
    x = ring.var("x")
    theta = MorphismCochain.from_entries(
        P, Q, {(0,): MatrixForm(ring, (0, 1), (0, 1), {(0, 1, (), 0): ring.one()})}, 0
    )
    assert theta.parity() == 1
    d = hom_differential(theta)
    got = matrix_of(d, 0)
    # delta_Q theta + theta delta_P by hand
    assert got[0][0] == x
    assert got[0][1] == ring.zero()
    assert got[1][0] == ring.zero()
    assert got[1][1] == x ** 2


def test_closed_comparison_morphism():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    Q = koszul_mf(sch, [["x^2"]], [["1"]])
    ring = sch.patch_ring(0)
    x = ring.var("x")
    phi = MorphismCochain.from_entries(
        P,
        Q,
        {(0,): MatrixForm(ring, (0, 1), (0, 1), {(0, 0, (), 0): ring.one(), (1, 1, (), 0): x})},
        0,
    )
    assert hom_differential(phi).is_zero()


def test_hom_differential_squares_to_zero_random():
    P = section_mf_three_patch()
    sch = P.scheme
    rng = random.Random(20260819)
    for trial in range(20):
        entries = {}
        for tup in sch.tuples(1) + sch.tuples(2):
            ring = sch.intersection(tup).ring
            mf = random_matrix_form(rng, ring, (0, 1), (0, 1), max_u=1, nterms=3)
            if not mf.is_zero():
                entries[tup] = mf
        phi = MorphismCochain(P, P, CechCochain(sch, P.bundle, P.bundle, entries, 2))
        dd = hom_differential(hom_differential(phi))
        assert dd.is_zero(), trial


def test_compose_shape_checked():
    P = section_mf_proj_line()
    sch = P.scheme
    Q = koszul_mf(sch, [["1", "1"]], [["0", "0"]])
    one_P = MorphismCochain.identity(P, 1)
    one_Q = MorphismCochain.identity(Q, 1)
    with pytest.raises(AssertionError, match="shape"):
        one_P.compose(one_Q)


def test_shift_involutive_z2():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    S = shift(P)
    assert S.bundle.gradings == (1, 0)
    assert S.deltas[0][0][1] == -P.deltas[0][0][1]
    assert check_mf(S).ok
    SS = shift(S)
    assert SS.bundle.gradings == P.bundle.gradings
    for r in range(2):
        for c in range(2):
            assert SS.deltas[0][r][c] == P.deltas[0][r][c]


def test_shift_raises_grading_z():
    sch = build_scheme(proj_line())
    r = sch.intersection((0, 1)).ring
    bundle = VectorBundle(sch, [0], {(0, 1): [[r.var("z")]]})
    P = MatrixFactorization(bundle, [[[0]], [[0]]])
    S = shift(P)
    assert S.bundle.gradings == (1,)


def test_direct_sum_blocks():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    Q = koszul_mf(sch, [["x^2"]], [["1"]])
    D = direct_sum(P, Q)
    assert D.bundle.gradings == (0, 1, 0, 1)
    ring = sch.patch_ring(0)
    x = ring.var("x")
    assert D.deltas[0][0][1] == x
    assert D.deltas[0][2][3] == ring.one()
    assert D.deltas[0][3][2] == x ** 2
    assert D.deltas[0][0][3] == ring.zero()
    assert D.deltas[0][2][1] == ring.zero()
    assert check_mf(D).ok


def test_direct_sum_on_two_patches():
    P = section_mf_proj_line()
    D = direct_sum(P, P)
    assert D.rank() == 4
    assert check_mf(D).ok


def test_retract_data_validates_projection():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    Q = koszul_mf(sch, [["x^2"]], [["1"]])
    N = direct_sum(P, Q)
    ring = sch.patch_ring(0)
    one = ring.one()
    g = MorphismCochain.from_entries(
        P,
        N,
        {(0,): MatrixForm(ring, N.bundle.parities(), P.bundle.parities(),
                          {(0, 0, (), 0): one, (1, 1, (), 0): one})},
        0,
    )
    f = MorphismCochain.from_entries(
        N,
        P,
        {(0,): MatrixForm(ring, P.bundle.parities(), N.bundle.parities(),
                          {(0, 0, (), 0): one, (1, 1, (), 0): one})},
        0,
    )
    rd = RetractData(P, N, g, f)
    pi = matrix_of(rd.pi, 0)
    for r in range(4):
        for c in range(4):
            want = one if (r == c and r < 2) else ring.zero()
            assert pi[r][c] == want


def test_retract_data_rejects_non_closed_f():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    Q = koszul_mf(sch, [["x^2"]], [["1"]])
    N = direct_sum(P, Q)
    ring = sch.patch_ring(0)
    one = ring.one()
    g = MorphismCochain.from_entries(
        P,
        N,
        {(0,): MatrixForm(ring, N.bundle.parities(), P.bundle.parities(),
                          {(0, 0, (), 0): one, (1, 1, (), 0): one})},
        0,
    )
    f_bad = MorphismCochain.from_entries(
        N,
        P,
        {(0,): MatrixForm(ring, P.bundle.parities(), N.bundle.parities(),
                          {(0, 0, (), 0): one, (1, 1, (), 0): one, (0, 2, (), 0): one})},
        0,
    )
    with pytest.raises(AssertionError, match="not closed"):
        RetractData(P, N, g, f_bad)


def test_retract_data_rejects_wrong_composite():
    sch = build_scheme(affine_line_squared())
    P = koszul_mf(sch, [["x"]], [["x"]])
    N = direct_sum(P, P)
    ring = sch.patch_ring(0)
    one = ring.one()
    g = MorphismCochain.from_entries(
        P,
        N,
        {(0,): MatrixForm(ring, N.bundle.parities(), P.bundle.parities(),
                          {(0, 0, (), 0): one, (1, 1, (), 0): one})},
        0,
    )
    f_zero = MorphismCochain.from_entries(
        N, P, {}, 0
    )
    with pytest.raises(AssertionError, match="1_P"):
        RetractData(P, N, g, f_zero)


def test_group_twist_frozen():
    sch = build_scheme(z2_reflection_on_line())
    P = koszul_mf(sch, [["x"]], [["x"]])
    sP = group_twist(P, "s")
    ring = sch.patch_ring(0)
    x = ring.var("x")
    assert sP.deltas[0][0][1] == -x
    assert sP.deltas[0][1][0] == -x
    assert check_mf(sP).ok
    eP = group_twist(P, "e")
    assert eP.deltas[0][0][1] == x


def test_twist_of_twist_recovers_delta():
    sch = build_scheme(z2_reflection_on_line())
    P = koszul_mf(sch, [["x"]], [["x"]])
    back = group_twist(group_twist(P, "s"), "s")
    for r in range(2):
        for c in range(2):
            assert back.deltas[0][r][c] == P.deltas[0][r][c]


def test_equivariant_structure_on_line():
    sch = build_scheme(z2_reflection_on_line())
    P = koszul_mf(sch, [["x"]], [["x"]])
    es = EquivariantStructure(
        P, {"e": [[[1, 0], [0, 1]]], "s": [[[1, 0], [0, -1]]]}
    )
    ring = sch.patch_ring(0)
    assert es.phi["s"][0][1][1] == ring.const(-1)
    tw = twist_by_character(es, {"e": 1, "s": -1})
    assert tw.phi["s"][0][0][0] == ring.const(-1)
    assert tw.phi["s"][0][1][1] == ring.one()
    assert tw.phi["e"][0][0][0] == ring.one()


def test_equivariant_cocycle_violation_rejected():
    sch = build_scheme(z2_reflection_on_line())
    P = koszul_mf(sch, [["x"]], [["x"]])
    with pytest.raises(AssertionError, match="cocycle"):
        EquivariantStructure(P, {"e": [[[1, 0], [0, 1]]], "s": [[[2, 0], [0, -2]]]})


def test_equivariant_delta_compat_rejected():
    sch = build_scheme(z2_reflection_on_line())
    P = koszul_mf(sch, [["x"]], [["x"]])
    with pytest.raises(AssertionError, match="intertwine"):
        EquivariantStructure(P, {"e": [[[1, 0], [0, 1]]], "s": [[[1, 0], [0, 1]]]})


def test_character_must_be_multiplicative():
    sch = build_scheme(z2_reflection_on_line())
    P = koszul_mf(sch, [["x"]], [["x"]])
    es = EquivariantStructure(
        P, {"e": [[[1, 0], [0, 1]]], "s": [[[1, 0], [0, -1]]]}
    )
    with pytest.raises(AssertionError, match="multiplicative"):
        twist_by_character(es, {"e": 1, "s": 2})


def test_equivariant_structure_across_patches():
    sch = build_scheme(z2_on_proj_line())
    r = sch.intersection((0, 1)).ring
    # even twist: the sign action lifts with constant phi
    bundle = VectorBundle(sch, [0], {(0, 1): [[r.var("z") ** 2]]})
    P = MatrixFactorization(bundle, [[[0]], [[0]]])
    EquivariantStructure(P, {"e": [[[1]], [[1]]], "s": [[[1]], [[1]]]})
    # odd twist: the same constants break on the overlap, opposite signs work
    bundle1 = VectorBundle(sch, [0], {(0, 1): [[r.var("z")]]})
    P1 = MatrixFactorization(bundle1, [[[0]], [[0]]])
    with pytest.raises(AssertionError, match="transition"):
        EquivariantStructure(P1, {"e": [[[1]], [[1]]], "s": [[[1]], [[1]]]})
    EquivariantStructure(P1, {"e": [[[1]], [[1]]], "s": [[[1]], [[-1]]]})


def test_tilde_factorization_rank_doubles():
    sch = build_scheme(z2_reflection_on_line())
    P = koszul_mf(sch, [["x"]], [["x"]])
    tilde = direct_sum(P, group_twist(P, "s"))
    assert tilde.rank() == 4
    assert check_mf(tilde).ok
    ring = sch.patch_ring(0)
    x = ring.var("x")
    assert tilde.deltas[0][2][3] == -x


def test_delta_cochain_round_trip():
    P = section_mf_proj_line()
    d = P.delta_cochain(2)
    assert d.homogeneous_total_parity() == 1
    ring = P.scheme.patch_ring(0)
    mf = d.entry((0,))
    assert mf.terms[(0, 1, (), 0)] == ring.var("z")
