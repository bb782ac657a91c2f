"""Schemes presented by finite ordered affine covers.

A CoveredScheme is a list of patches with pairwise gluing data, a potential,
and optionally a finite group acting linearly patch by patch.  Ordered
intersections are presented in the coordinates of their smallest-index patch.
"""

from __future__ import annotations

import itertools
import warnings
from fractions import Fraction

from .rings import (
    LocalFrac,
    Ring,
    RingMap,
    ScalarPoly,
    parse_scalar,
    solve_affine_q,
    solve_linear_graded,
)

__all__ = [
    "Patch",
    "CoveredScheme",
    "GroupAction",
    "FixedLocus",
    "build_scheme",
    "reroot",
    "fixed_locus",
]


class Patch:

    __slots__ = ("ring", "potential")

    def __init__(self, ring, potential):
        assert isinstance(ring, Ring)
        assert isinstance(potential, LocalFrac) and potential.ring.name == ring.name
        self.ring = ring
        self.potential = potential


class Intersection:
    """Ordered multiple overlap, presented in the smallest-index patch's coordinates."""

    __slots__ = ("tup", "ring", "restrictions")

    def __init__(self, tup, ring, restrictions):
        self.tup = tup
        self.ring = ring
        # restrictions[i]: RingMap from patch i's ring, for each i in tup
        self.restrictions = restrictions


class GroupAction:
    """Finite group given by a multiplication table, acting patchwise.

    maps[g][i] is a RingMap from patch i's ring to itself and the assignment
    g -> maps[g][i] is a homomorphism for composition of ring maps.
    """

    __slots__ = ("elements", "table", "maps", "identity")

    def __init__(self, elements, table, maps):
        self.elements = tuple(elements)
        n = len(self.elements)
        assert len(table) == n and all(len(row) == n for row in table)
        self.table = tuple(tuple(row) for row in table)
        self.maps = maps
        ident = None
        for a in range(n):
            if all(self.table[a][b] == b and self.table[b][a] == b for b in range(n)):
                ident = a
        assert ident is not None, "multiplication table has no identity"
        self.identity = self.elements[ident]
        for a in range(n):
            assert sorted(self.table[a]) == list(range(n)), "table row not a bijection"

    def index(self, g):
        return self.elements.index(g)

    def mult(self, g, h):
        return self.elements[self.table[self.index(g)][self.index(h)]]

    def inverse(self, g):
        gi = self.index(g)
        for b in range(len(self.elements)):
            if self.table[gi][b] == self.index(self.identity):
                return self.elements[b]
        raise AssertionError("element without inverse")

    def map(self, g, patch_index):
        return self.maps[g][patch_index]

    def affine_data(self, g, patch_index):
        """The (matrix, shift) of the linear substitution, or an error."""
        rm = self.map(g, patch_index)
        return _affine_data_of_map(rm)


def _affine_data_of_map(rm):
    nvars = len(rm.source.vars)
    matrix = [[Fraction(0)] * nvars for _ in range(nvars)]
    shift = [Fraction(0)] * nvars
    for m, img in enumerate(rm.images):
        if any(img.den):
            raise ValueError("unsupported action: image has denominators")
        for exps, c in img.num.terms.items():
            total = sum(exps)
            if total == 0:
                shift[m] = c
            elif total == 1:
                matrix[m][exps.index(1)] = c
            else:
                raise ValueError("unsupported action: nonlinear substitution")
    return matrix, shift


class CoveredScheme:

    def __init__(
        self,
        grading,
        dimension,
        patches,
        pair_data,
        empty_pairs=(),
        action=None,
        all_critical_values_zero=False,
    ):
        assert grading in ("Z", "Z2")
        assert dimension >= 0
        self.grading = grading
        self.dimension = dimension
        self.patches = list(patches)
        # pair_data[(i, j)] = (denominator polys in patch-i coordinates,
        #                      images of patch-j variables) for i < j
        self.pair_data = dict(pair_data)
        self.empty_pairs = {tuple(sorted(p)) for p in empty_pairs}
        self.action = action
        self.all_critical_values_zero = all_critical_values_zero
        self._intersections = {}
        self._restrictions = {}
        self._validate()

    # -- structure ---------------------------------------------------------

    def patch_ring(self, i):
        return self.patches[i].ring

    def potential(self, i):
        return self.patches[i].potential

    def npatches(self):
        return len(self.patches)

    def is_nonempty(self, tup):
        return all(
            tuple(sorted(p)) not in self.empty_pairs
            for p in itertools.combinations(sorted(tup), 2)
        )

    def tuples(self, size):
        """All nonempty strictly increasing index tuples of the given length."""
        return [
            t
            for t in itertools.combinations(range(self.npatches()), size)
            if self.is_nonempty(t)
        ]

    def intersection(self, tup):
        tup = tuple(tup)
        assert all(a < b for a, b in zip(tup, tup[1:])), f"tuple not increasing: {tup}"
        assert self.is_nonempty(tup), f"empty intersection requested: {tup}"
        if tup in self._intersections:
            return self._intersections[tup]
        base = self.patches[tup[0]].ring
        dens = list(base.denominators)
        for j in tup[1:]:
            for d in self.pair_data[(tup[0], j)][0]:
                if d not in dens:
                    dens.append(d)
        if len(tup) == 1:
            ring = base
        else:
            name = "&".join(self.patches[k].ring.name for k in tup)
            ring = Ring(name, base.vars, dens)
        restrictions = {}
        for j in tup:
            if j == tup[0]:
                images = tuple(ring.var(v) for v in base.vars)
                source = base
            else:
                source = self.patches[j].ring
                raw = self.pair_data[(tup[0], j)][1]
                images = tuple(reroot(ring, img) for img in raw)
            restrictions[j] = RingMap(source, ring, images)
        out = Intersection(tup, ring, restrictions)
        self._intersections[tup] = out
        return out

    def restriction(self, small, big):
        """RingMap from the small tuple's ring into the big tuple's ring."""
        small, big = tuple(small), tuple(big)
        if (small, big) in self._restrictions:
            return self._restrictions[(small, big)]
        assert set(small) <= set(big)
        src = self.intersection(small).ring
        dst_inter = self.intersection(big)
        if small[0] == big[0]:
            images = tuple(dst_inter.ring.var(v) for v in src.vars)
        else:
            images = dst_inter.restrictions[small[0]].images
        out = RingMap(src, dst_inter.ring, images)
        self._restrictions[(small, big)] = out
        return out

    def action_on(self, tup, g):
        """The g-action transported to the intersection ring of tup."""
        assert self.action is not None
        ring = self.intersection(tup).ring
        base = self.action.map(g, tup[0])
        images = tuple(reroot(ring, img) for img in base.images)
        return RingMap(ring, ring, images)

    # -- validation --------------------------------------------------------

    def _validate(self):
        if self.grading == "Z":
            for i, p in enumerate(self.patches):
                assert p.potential.is_zero(), (
                    f"grading Z requires zero potential, patch {i} has {p.potential}"
                )
        for (i, j), (dens, images) in self.pair_data.items():
            assert i < j
            base = self.patches[i].ring
            for d in dens:
                assert isinstance(d, ScalarPoly) and d.vars == base.vars
                assert not d.is_zero()
            assert len(images) == len(self.patches[j].ring.vars)
        # potentials agree on pairwise overlaps
        for (i, j) in sorted(self.pair_data):
            if not self.is_nonempty((i, j)):
                continue
            inter = self.intersection((i, j))
            wi = inter.restrictions[i].apply(self.patches[i].potential)
            wj = inter.restrictions[j].apply(self.patches[j].potential)
            if wi != wj:
                raise ValueError(
                    f"potential mismatch on overlap ({i},{j}): {wi} vs {wj}"
                )
        # triple consistency: going through the middle patch agrees
        for (i, j, k) in self.tuples(3):
            inter = self.intersection((i, j, k))
            via = RingMap(
                self.patches[k].ring,
                inter.ring,
                tuple(
                    _applyrerooted(inter.ring, self.pair_data[(i, j)][1], img)
                    for img in self.pair_data[(j, k)][1]
                ),
            )
            direct = inter.restrictions[k]
            for a, b in zip(via.images, direct.images):
                assert a == b, f"incompatible gluing data on triple ({i},{j},{k})"
        if self.action is not None:
            self._validate_action()

    def _validate_action(self):
        act = self.action
        n = self.npatches()
        assert set(act.maps) == set(act.elements)
        for g in act.elements:
            assert len(act.maps[g]) == n
        # group law patchwise, exact equality of images
        for g in act.elements:
            for h in act.elements:
                gh = act.mult(g, h)
                for i in range(n):
                    comp = act.map(g, i).compose(act.map(h, i))
                    for a, b in zip(comp.images, act.map(gh, i).images):
                        assert a == b, f"action fails group law at ({g},{h}), patch {i}"
        # identity acts as identity
        for i in range(n):
            for a, b in zip(
                act.map(act.identity, i).images,
                RingMap.identity(self.patches[i].ring).images,
            ):
                assert a == b, "identity element must act trivially"
        # the potential is fixed
        for g in act.elements:
            for i in range(n):
                assert act.map(g, i).apply(self.patches[i].potential) == self.patches[
                    i
                ].potential, f"potential not fixed by {g} on patch {i}"
        # actions commute with the gluing maps
        for (i, j) in sorted(self.pair_data):
            if not self.is_nonempty((i, j)):
                continue
            inter = self.intersection((i, j))
            rho_ij = inter.restrictions[j]
            for g in act.elements:
                gi = self.action_on((i, j), g)
                lhs = [gi.apply(img) for img in rho_ij.images]
                rhs = [
                    rho_ij.apply(img) for img in act.map(g, j).images
                ]
                for a, b in zip(lhs, rhs):
                    assert a == b, f"action of {g} does not respect gluing ({i},{j})"


def reroot(ring, value):
    """Reinterpret a LocalFrac in a ring with the same variables and a
    superset of the denominator generators."""
    assert value.ring.vars == ring.vars
    num = ScalarPoly(ring.vars, value.num.terms)
    out = LocalFrac(ring, num)
    for g, m in zip(value.ring.denominators, value.den):
        if m:
            g2 = ScalarPoly(ring.vars, g.terms)
            out = out * LocalFrac(ring, g2).unit_inverse() ** m
    return out


def _applyrerooted(ring, images, value):
    """Apply variable images (given as LocalFracs rerooted into ring) to value."""
    imgs = tuple(reroot(ring, im) for im in images)
    out = value.num.substitute(imgs, ring)
    for g, m in zip(value.ring.denominators, value.den):
        if m:
            g_img = g.substitute(imgs, ring)
            out = out * g_img.unit_inverse() ** m
    return out


def build_scheme(config, check_covering=False, covering_bound=4):
    """Assemble and validate a CoveredScheme from a structured description.

    The description is a plain dict; polynomials and substitutions are given
    as expression strings in the patch variables.
    """
    grading = config["grading"]
    dimension = config["dimension"]
    rings = []
    for spec in config["patches"]:
        variables = tuple(spec["variables"])
        pre = Ring(spec["name"], variables)
        dens = tuple(
            parse_scalar(pre, d).num for d in spec.get("denominators", ())
        )
        rings.append(Ring(spec["name"], variables, dens))
    patches = []
    for ring, spec, pot in zip(rings, config["patches"], config["potentials"]):
        patches.append(Patch(ring, parse_scalar(ring, pot)))
    pair_data = {}
    for glue in config.get("gluings", ()):
        i, j = glue["pair"]
        assert i < j, "gluing pairs must be given with increasing indices"
        base = rings[i]
        dens = tuple(parse_scalar(base, d).num for d in glue.get("denominators", ()))
        scratch = Ring(f"{base.name}*{j}", base.vars, base.denominators + dens)
        images = tuple(parse_scalar(scratch, e) for e in glue["images"])
        pair_data[(i, j)] = (dens, images)
    empty_pairs = [tuple(p) for p in config.get("empty_pairs", ())]
    action = None
    if "group" in config and config["group"] is not None:
        gspec = config["group"]
        elements = tuple(gspec["elements"])
        maps = {}
        for g, per_patch in zip(elements, gspec["action"]):
            maps[g] = [
                RingMap(
                    ring, ring, tuple(parse_scalar(ring, e) for e in images)
                )
                for ring, images in zip(rings, per_patch)
            ]
        action = GroupAction(elements, gspec["table"], maps)
    scheme = CoveredScheme(
        grading,
        dimension,
        patches,
        pair_data,
        empty_pairs=empty_pairs,
        action=action,
        all_critical_values_zero=config.get("all_critical_values_zero", False),
    )
    if check_covering:
        _covering_check(scheme, covering_bound)
    return scheme


def _covering_check(scheme, bound):
    """Try to certify that the declared denominators generate the unit ideal
    on each patch; warn when inconclusive within the degree bound."""
    for i, patch in enumerate(scheme.patches):
        gens = [d for (a, b), (dens, _) in scheme.pair_data.items() if a == i for d in dens]
        if not gens:
            continue
        plain = Ring(patch.ring.name + "#", patch.ring.vars)
        eqs = [
            (
                [
                    (LocalFrac(plain, ScalarPoly(plain.vars, g.terms)), f"c{k}")
                    for k, g in enumerate(gens)
                ],
                plain.one(),
            )
        ]
        if solve_linear_graded(eqs, degree_bound=bound) is None:
            warnings.warn(
                f"covering completeness inconclusive on patch {i} "
                f"(degree bound {bound})",
                stacklevel=3,
            )


class FixedLocus:
    """The fixed-point subscheme of one group element, as its own covered scheme.

    patch_map sends an ambient patch index to the locus patch index, or None
    when the fixed locus misses that patch.  restrictions[i] is the RingMap
    from ambient patch i onto its locus piece; parametrizations[i] = (x0, L)
    over Q with ambient coordinates x = x0 + L t on the piece.
    """

    __slots__ = ("element", "scheme", "patch_map", "restrictions", "parametrizations")

    def __init__(self, element, scheme, patch_map, restrictions, parametrizations):
        self.element = element
        self.scheme = scheme
        self.patch_map = patch_map
        self.restrictions = restrictions
        self.parametrizations = parametrizations


def _affine_substitute(matrix, shift, values, ring):
    """Evaluate x -> matrix.x + shift at a vector of LocalFracs."""
    out = []
    for row, s in zip(matrix, shift):
        acc = ring.const(s)
        for c, v in zip(row, values):
            if c != 0:
                acc = acc + v * c
        out.append(acc)
    return out


def _left_inverse(columns, nrows):
    """A rational left inverse of the matrix with the given columns."""
    ncols = len(columns)
    rows = [[columns[c][r] for c in range(ncols)] for r in range(nrows)]
    # row-reduce [L | I] and read the inverse off the pivot rows
    aug = [rows[r] + [Fraction(1 if k == r else 0) for k in range(nrows)] for r in range(nrows)]
    r = 0
    pivot_rows = []
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if aug[i][c] != 0:
                pivot = i
                break
        assert pivot is not None, "kernel basis columns must be independent"
        aug[r], aug[pivot] = aug[pivot], aug[r]
        lead = aug[r][c]
        aug[r] = [v / lead for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
        pivot_rows.append(r)
        r += 1
    return [[aug[i][ncols + k] for k in range(nrows)] for i in pivot_rows]


def fixed_locus(scheme, g):
    """Present the fixed subscheme of the group element g patch by patch."""
    act = scheme.action
    assert act is not None, "scheme has no group action"
    n = scheme.npatches()
    patch_map = {}
    restrictions = {}
    parametrizations = {}
    locus_patches = []
    locus_rings = []
    for i in range(n):
        ring = scheme.patch_ring(i)
        nvars = len(ring.vars)
        matrix, shift = act.affine_data(g, i)
        rows = [
            [matrix[r][c] - (1 if r == c else 0) for c in range(nvars)]
            for r in range(nvars)
        ]
        sol = solve_affine_q(rows, [-s for s in shift])
        if sol is None:
            patch_map[i] = None
            continue
        x0, basis = sol
        columns = basis  # each entry is a length-nvars column
        tvars = tuple(f"t{k}" for k in range(len(columns)))
        pre = Ring(f"{ring.name}^{g}", tvars)
        # parametrization x = x0 + L t as polynomials in t
        param = []
        for r in range(nvars):
            terms = {}
            if x0[r] != 0:
                terms[(0,) * len(tvars)] = x0[r]
            for c, col in enumerate(columns):
                if col[r] != 0:
                    e = tuple(1 if k == c else 0 for k in range(len(tvars)))
                    terms[e] = terms.get(e, Fraction(0)) + col[r]
            param.append(ScalarPoly(tvars, terms))
        # ambient denominators restricted to the piece; zero means empty
        dens = []
        empty = False
        for d in ring.denominators:
            rd = d.substitute(
                [LocalFrac(pre, p) for p in param], pre
            )
            if rd.is_zero():
                empty = True
                break
            if rd.as_constant() is None:
                assert not any(rd.den)
                dens.append(rd.num)
        if empty:
            patch_map[i] = None
            continue
        locus_ring = Ring(f"{ring.name}^{g}", tvars, tuple(dens))
        restr = RingMap(
            ring,
            locus_ring,
            tuple(LocalFrac(locus_ring, ScalarPoly(tvars, p.terms)) for p in param),
        )
        # the locus must actually be fixed
        for v, img in zip(ring.vars, restr.images):
            assert restr.apply(act.map(g, i).apply(ring.var(v))) == img, (
                f"parametrized locus not fixed by {g} on patch {i}"
            )
        patch_map[i] = len(locus_patches)
        locus_rings.append(locus_ring)
        restrictions[i] = restr
        parametrizations[i] = (x0, columns)
        locus_patches.append(Patch(locus_ring, restr.apply(scheme.potential(i))))

    pair_data = {}
    empty_pairs = []
    ambient_alive = [i for i in range(n) if patch_map[i] is not None]
    for ai, aj in itertools.combinations(ambient_alive, 2):
        if not scheme.is_nonempty((ai, aj)):
            empty_pairs.append((patch_map[ai], patch_map[aj]))
            continue
        li, lj = patch_map[ai], patch_map[aj]
        ring_i = locus_rings[li]
        restr_i = restrictions[ai]
        # gluing denominators restricted to the locus piece
        dens = []
        empty = False
        for d in scheme.pair_data[(ai, aj)][0]:
            rd = d.substitute(restr_i.images, ring_i)
            assert not any(rd.den)
            if rd.num.is_zero():
                empty = True
                break
            if rd.num.as_constant() is None:
                dens.append(rd.num)
        if empty:
            empty_pairs.append((li, lj))
            continue
        pair_ring = Ring(
            f"{ring_i.name}&{lj}", ring_i.vars, ring_i.denominators + tuple(dens)
        )
        # ambient transition functions restricted to the locus
        restricted = []
        ok = True
        lifted = [reroot(pair_ring, v) for v in restr_i.images]
        for img in scheme.pair_data[(ai, aj)][1]:
            val = img.num.substitute(lifted, pair_ring)
            for dgen, m in zip(img.ring.denominators, img.den):
                if m:
                    dim = dgen.substitute(lifted, pair_ring)
                    inv = dim.inverse()
                    if inv is None:
                        ok = False
                        break
                    val = val * inv ** m
            if not ok:
                break
            restricted.append(val)
        assert ok, f"gluing ({ai},{aj}) does not restrict to the locus of {g}"
        x0j, Lj = parametrizations[aj]
        nvars_j = len(scheme.patch_ring(aj).vars)
        if Lj:
            Mj = _left_inverse(Lj, nvars_j)
        else:
            Mj = []
        images = []
        diffs = [v - x0j[r] for r, v in enumerate(restricted)]
        for row in Mj:
            acc = pair_ring.zero()
            for c, v in zip(row, diffs):
                if c != 0:
                    acc = acc + v * c
            images.append(acc)
        # well-definedness: x0j + Lj.(images) reproduces the restricted gluing
        for r in range(nvars_j):
            recon = pair_ring.const(x0j[r])
            for c, col in enumerate(Lj):
                if col[r] != 0:
                    recon = recon + images[c] * col[r]
            assert recon == restricted[r], (
                f"gluing ({ai},{aj}) does not carry the locus of {g} to itself"
            )
        pair_data[(li, lj)] = (tuple(dens), tuple(images))

    locus_scheme = CoveredScheme(
        scheme.grading,
        max((len(r.vars) for r in locus_rings), default=0),
        locus_patches,
        pair_data,
        empty_pairs=empty_pairs,
        action=None,
        all_critical_values_zero=scheme.all_critical_values_zero,
    )
    return FixedLocus(g, locus_scheme, patch_map, restrictions, parametrizations)


def locus_transport(scheme, locus_src, locus_dst, h):
    """Per-patch ring maps O(X^{h g h^-1}) -> O(X^g) realizing transport by h.

    locus_src is the fixed locus of g, locus_dst the fixed locus of h g h^-1.
    Returns {ambient patch index: RingMap} on patches where both pieces exist.
    """
    act = scheme.action
    hinv = act.inverse(h)
    out = {}
    for i in range(scheme.npatches()):
        si = locus_src.patch_map.get(i)
        di = locus_dst.patch_map.get(i)
        if si is None:
            continue
        assert di is not None, (
            f"transport by {h} hits an empty piece on patch {i}"
        )
        ring_src = locus_src.scheme.patch_ring(si)
        matrix, shift = act.affine_data(hinv, i)
        # image of ambient coordinates under the point map, on the g-locus
        moved = _affine_substitute(
            matrix, shift, list(locus_src.restrictions[i].images), ring_src
        )
        x0d, Ld = locus_dst.parametrizations[i]
        nvars = len(scheme.patch_ring(i).vars)
        Md = _left_inverse(Ld, nvars) if Ld else []
        diffs = [v - x0d[r] for r, v in enumerate(moved)]
        images = []
        for row in Md:
            acc = ring_src.zero()
            for c, v in zip(row, diffs):
                if c != 0:
                    acc = acc + v * c
            images.append(acc)
        for r in range(nvars):
            recon = ring_src.const(x0d[r])
            for c, col in enumerate(Ld):
                if col[r] != 0:
                    recon = recon + images[c] * col[r]
            assert recon == moved[r], (
                f"transport by {h} does not map the locus correctly on patch {i}"
            )
        out[i] = RingMap(locus_dst.scheme.patch_ring(di), ring_src, tuple(images))
    return out
