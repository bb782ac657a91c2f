import random
from mfchern.cech import MatrixForm
from mfchern.cohomology import total_differential
from mfchern.connection import default_connection
from mfchern.hochschild import GeometricCategory, HochschildChain, hochschild_b, connes_B, tr_nabla
from mfchern.mf import MorphismCochain, MatrixFactorization, VectorBundle
from mfchern.rings import parse_scalar
from tests.test_hochschild import proj_objects, random_connection
from tests.test_mf import section_mf_proj_line

trunc = 3

P = section_mf_proj_line()
sch = P.scheme

# rank 4, gradings [0,0,1,1], twists (0,1,0,1), zero differential
r01 = sch.intersection((0, 1)).ring
z = r01.var("z")


def diagm(*powers):
    rows = []
    for i, p in enumerate(powers):
        row = [r01.zero()] * len(powers)
        row[i] = z ** p if p else r01.one()
        rows[len(rows):] = [row]
    return rows


bundle4 = VectorBundle(sch, [0, 0, 1, 1], {(0, 1): diagm(0, -1, 0, -1)})
zero4 = [[0] * 4 for _ in range(4)]
Q4 = MatrixFactorization(bundle4, [zero4, zero4])

TWISTS = {id(P): (0, 1), id(Q4): (0, 1, 0, 1)}


def global_endo(rng, obj, parity):
    """Random global section of End(obj): entry (r,c) is a polynomial of
    degree <= d_c - d_r on patch 0, reversed on patch 1."""
    d = TWISTS[id(obj)]
    par = obj.bundle.parities()
    rank = len(par)
    r0 = sch.intersection((0,)).ring
    r1 = sch.intersection((1,)).ring
    m0 = [[r0.zero()] * rank for _ in range(rank)]
    m1 = [[r1.zero()] * rank for _ in range(rank)]
    got = False
    for r in range(rank):
        for c in range(rank):
            if (par[r] + par[c]) % 2 != parity:
                continue
            win = d[c] - d[r]
            if win < 0:
                continue
            coeffs = [rng.randint(-3, 3) for _ in range(win + 1)]
            if all(v == 0 for v in coeffs):
                continue
            got = True
            p0 = r0.zero()
            p1 = r1.zero()
            for k, v in enumerate(coeffs):
                if v:
                    p0 = p0 + r0.const(v) * r0.var("z") ** k
                    p1 = p1 + r1.const(v) * r1.var("w") ** (win - k)
            m0[r][c] = p0
            m1[r][c] = p1
    if not got:
        return None
    e0 = MatrixForm.from_entries(r0, par, par, m0)
    e1 = MatrixForm.from_entries(r1, par, par, m1)
    return MorphismCochain.from_entries(obj, obj, {(0,): e0, (1,): e1}, trunc)


def check(tag, obj, n, seed):
    rng = random.Random(seed)
    cat = GeometricCategory(sch, trunc)
    entries = []
    while len(entries) < n + 1:
        a = global_endo(rng, obj, rng.randint(0, 1))
        if a is not None:
            entries.append(a)
    x = HochschildChain.single(cat, trunc, 4, entries[0], tuple(entries[1:]))
    if x.is_zero():
        print(tag, "-> degenerate (zero chain)")
        return
    conn = default_connection(obj) if rng.random() < 0.5 else random_connection(rng, obj, trunc)
    conns = {obj: conn}
    lhs = total_differential(tr_nabla(x, conns))
    image = hochschild_b(x, curved=False) + connes_B(x).shift_u(1)
    rhs = tr_nabla(image, conns)
    diff = lhs - rhs
    print(tag, "->", "ZERO" if diff.is_zero() else "FAIL")
    if not diff.is_zero():
        print(diff.canonical_string()[:400])


for n in (1, 2, 3):
    for seed in (1, 2, 3, 4):
        check(f"P  n={n} seed={seed}", P, n, seed)
for n in (1, 2, 3):
    for seed in (1, 2, 3, 4):
        check(f"Q4 n={n} seed={seed}", Q4, n, seed)


def global_hom(rng, src, tgt, parity):
    dsrc = TWISTS[id(src)]
    dtgt = TWISTS[id(tgt)]
    psrc = src.bundle.parities()
    ptgt = tgt.bundle.parities()
    r0 = sch.intersection((0,)).ring
    r1 = sch.intersection((1,)).ring
    m0 = [[r0.zero()] * len(psrc) for _ in range(len(ptgt))]
    m1 = [[r1.zero()] * len(psrc) for _ in range(len(ptgt))]
    got = False
    for r in range(len(ptgt)):
        for c in range(len(psrc)):
            if (ptgt[r] + psrc[c]) % 2 != parity:
                continue
            win = dsrc[c] - dtgt[r]
            if win < 0:
                continue
            coeffs = [rng.randint(-3, 3) for _ in range(win + 1)]
            if all(v == 0 for v in coeffs):
                continue
            got = True
            p0 = r0.zero()
            p1 = r1.zero()
            for k, v in enumerate(coeffs):
                if v:
                    p0 = p0 + r0.const(v) * r0.var("z") ** k
                    p1 = p1 + r1.const(v) * r1.var("w") ** (win - k)
            m0[r][c] = p0
            m1[r][c] = p1
    if not got:
        return None
    e0 = MatrixForm.from_entries(r0, ptgt, psrc, m0)
    e1 = MatrixForm.from_entries(r1, ptgt, psrc, m1)
    return MorphismCochain.from_entries(src, tgt, {(0,): e0, (1,): e1}, trunc)


def check_mixed(tag, cycle, seed):
    """cycle = (P_0, P_1, ..., P_n): a_i maps P_{i+1} -> P_i, a_n wraps."""
    rng = random.Random(seed)
    cat = GeometricCategory(sch, trunc)
    n = len(cycle) - 1
    entries = []
    for i in range(n + 1):
        srcobj = cycle[(i + 1) % (n + 1)]
        tgtobj = cycle[i]
        a = None
        for _ in range(30):
            a = global_hom(rng, srcobj, tgtobj, rng.randint(0, 1))
            if a is not None:
                break
        if a is None:
            print(tag, "-> sampler failed")
            return
        entries.append(a)
    x = HochschildChain.single(cat, trunc, 4, entries[0], tuple(entries[1:]))
    if x.is_zero():
        print(tag, "-> degenerate (zero chain)")
        return
    conns = {}
    for obj in set(id(o) for o in cycle):
        pass
    objs = {id(c): c for c in cycle}
    for obj in objs.values():
        conns[obj] = default_connection(obj) if rng.random() < 0.5 else random_connection(rng, obj, trunc)
    lhs = total_differential(tr_nabla(x, conns))
    image = hochschild_b(x, curved=False) + connes_B(x).shift_u(1)
    rhs = tr_nabla(image, conns)
    diff = lhs - rhs
    print(tag, "->", "ZERO" if diff.is_zero() else "FAIL")
    if not diff.is_zero():
        print(diff.canonical_string()[:400])


for seed in (11, 12, 13):
    check_mixed(f"P<->Q4 n=1 seed={seed}", (P, Q4), seed)
    check_mixed(f"P<->Q4 n=2 seed={seed}", (P, Q4, P), seed)
    check_mixed(f"Q4,P,Q4 n=2 seed={seed}", (Q4, P, Q4), seed)
