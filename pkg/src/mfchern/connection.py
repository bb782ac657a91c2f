"""Patchwise connections, total curvature, and the Atiyah cocycle.

A connection on a trivialized patch is d plus a matrix of 1-forms.  The
total curvature collects three families: the u-weighted square dC + C^2,
the commutator with delta, and the frame differences across overlaps.
"""

from __future__ import annotations

from .cech import CechCochain, MatrixForm, pullback_matrix
from .mf import MatrixFactorization, invert_matrix
from .rings import Fraction

__all__ = [
    "Connection",
    "Curvature",
    "default_connection",
    "group_transformed_connection",
    "averaged_connection",
    "total_curvature",
    "atiyah_cocycle",
    "apply_connection",
]


class Connection:
    """Per-patch matrices C_i of 1-forms; the covariant derivative on patch
    i is d + C_i in the local frame."""

    __slots__ = ("mf", "matrices")

    def __init__(self, mf, matrices=None):
        assert isinstance(mf, MatrixFactorization)
        self.mf = mf
        scheme = mf.scheme
        parities = mf.bundle.parities()
        n = scheme.npatches()
        if matrices is None:
            matrices = [None] * n
        assert len(matrices) == n
        self.matrices = []
        for i, C in enumerate(matrices):
            ring = scheme.patch_ring(i)
            if C is None:
                C = MatrixForm(ring, parities, parities, {})
            assert isinstance(C, MatrixForm)
            assert C.ring.name == ring.name
            assert C.row_parities == parities and C.col_parities == parities
            for key in C.terms:
                r, c, idxs, u = key
                assert len(idxs) == 1, "connection entries must be 1-forms"
                assert u == 0, "connection entries carry no u"
                assert C.term_endo_parity(key) == 0, (
                    "connection entries must preserve the internal grading"
                )
            self.matrices.append(C)

    def scheme(self):
        return self.mf.scheme

    def matrix(self, i):
        return self.matrices[i]

    def cochain(self, u_truncation):
        entries = {}
        for (i,) in self.mf.scheme.tuples(1):
            if not self.matrices[i].is_zero():
                entries[(i,)] = self.matrices[i]
        return CechCochain(
            self.mf.scheme, self.mf.bundle, self.mf.bundle, entries, u_truncation
        )


def default_connection(P):
    """d in every local frame."""
    return Connection(P, None)


def apply_connection(conn, i, section):
    """(d + C_i) applied to a column of forms over patch i."""
    C = conn.matrix(i)
    assert section.ring.name == C.ring.name
    return section.d_form() + C.mul(section)


def group_transformed_connection(conn, structure, g):
    """The connection g.C with matrix phi_g rho_g(C) phi_g^{-1} + phi_g
    d(phi_g^{-1}) on each patch."""
    P = structure.P
    assert conn.mf is P
    scheme = P.scheme
    act = scheme.action
    out = []
    for i in range(scheme.npatches()):
        ring = scheme.patch_ring(i)
        rho = act.map(g, i)
        phi = structure.phi_matrix_form(g, i)
        inv_rows = invert_matrix(ring, structure.phi[g][i])
        parities = P.bundle.parities()
        inv_terms = {}
        for r, row in enumerate(inv_rows):
            for c, v in enumerate(row):
                if not v.is_zero():
                    inv_terms[(r, c, (), 0)] = v
        phi_inv = MatrixForm(ring, parities, parities, inv_terms)
        moved = pullback_matrix(rho, conn.matrix(i))
        C = phi.mul(moved).mul(phi_inv) + phi.mul(phi_inv.d_form())
        out.append(C)
    return Connection(P, out)


def averaged_connection(conn, structure):
    """Group average (1/|G|) sum_g g.C; the result is exactly invariant."""
    P = structure.P
    act = P.scheme.action
    order = len(act.elements)
    total = None
    for g in act.elements:
        C = group_transformed_connection(conn, structure, g)
        if total is None:
            total = C.matrices
        else:
            total = [a + b for a, b in zip(total, C.matrices)]
    avg = Connection(P, [m.scale(Fraction(1, order)) for m in total])
    for g in act.elements:
        back = group_transformed_connection(avg, structure, g)
        for i in range(P.scheme.npatches()):
            assert back.matrices[i] == avg.matrices[i], (
                f"average not invariant under {g} on patch {i}"
            )
    return avg


class Curvature:
    """Total curvature split into its three supports: (form 2, u^1) squares,
    (form 1, internal odd) commutators, and (Cech 1, form 1) frame jumps."""

    __slots__ = ("mf", "second_order", "commutator", "frame_difference")

    def __init__(self, mf, second_order, commutator, frame_difference):
        self.mf = mf
        self.second_order = second_order
        self.commutator = commutator
        self.frame_difference = frame_difference

    def cochain(self):
        total = self.second_order + self.commutator + self.frame_difference
        if not total.is_zero():
            assert total.homogeneous_total_parity() == 0
        return total


def total_curvature(P, conn, with_u=True, u_truncation=None):
    scheme = P.scheme
    if u_truncation is None:
        u_truncation = scheme.dimension + scheme.npatches() + 1
    bundle = P.bundle
    second = {}
    comm = {}
    for (i,) in scheme.tuples(1):
        C = conn.matrix(i)
        if with_u:
            sq = (C.d_form() + C.mul(C)).shift_u(1)
            if not sq.is_zero():
                second[(i,)] = sq
        delta = P.delta_matrix_form(i)
        value = delta.d_form() + C.mul(delta) + delta.mul(C)
        if not value.is_zero():
            comm[(i,)] = value
    frame = _frame_differences(P, conn, u_truncation)
    return Curvature(
        P,
        CechCochain(scheme, bundle, bundle, second, u_truncation),
        CechCochain(scheme, bundle, bundle, comm, u_truncation),
        frame,
    )


def _frame_differences(P, conn, u_truncation):
    scheme = P.scheme
    bundle = P.bundle
    conn_cochain = conn.cochain(u_truncation)
    entries = {}
    for (i, j) in scheme.tuples(2):
        ring = scheme.intersection((i, j)).ring
        g = bundle.transition(scheme, ring, i, j)
        ginv = bundle.transition_inverse(scheme, ring, i, j)
        # nabla_j in the i frame is d + g d(g^{-1}) + g C_j g^{-1}
        value = g.mul(ginv.d_form()).scale(-1)
        if (i,) in conn_cochain.entries:
            value = value + conn_cochain.transport((i,), (i, j))
        if (j,) in conn_cochain.entries:
            value = value - conn_cochain.transport((j,), (i, j))
        if not value.is_zero():
            entries[(i, j)] = value
    return CechCochain(scheme, bundle, bundle, entries, u_truncation)


def atiyah_cocycle(E, conn=None, u_truncation=4):
    """Cech 1-cochain of frame differences nabla_i - nabla_j; delta is not
    involved, so a bare bundle works via a zero factorization."""
    if isinstance(E, MatrixFactorization):
        P = E
    else:
        rank = len(E.parities())
        zero_rows = [[0] * rank for _ in range(rank)]
        P = MatrixFactorization(E, [zero_rows for _ in range(E.scheme.npatches())])
    if conn is None:
        conn = default_connection(P)
    assert conn.mf.bundle is P.bundle
    return _frame_differences(P, conn, u_truncation)
