import random
from mfchern.cech import MatrixForm, cech_differential, acw_product
from mfchern.cohomology import total_differential
from mfchern.connection import default_connection
from mfchern.hochschild import GeometricCategory, HochschildChain, hochschild_b, connes_B, tr_nabla
from mfchern.mf import MorphismCochain, hom_differential
from mfchern.rings import parse_scalar
from tests.test_hochschild import proj_objects

sch, objects = proj_objects()
P = objects[0]
trunc = 3
cat = GeometricCategory(sch, trunc)
par = P.bundle.parities()


def mk(entries):
    built = {}
    for tup, rows in entries.items():
        ring = sch.intersection(tup).ring
        built[tup] = MatrixForm.from_entries(ring, par, par, [[parse_scalar(ring, str(v)) for v in row] for row in rows])
    return MorphismCochain.from_entries(P, P, built, trunc)


zrow = [[0, 0], [0, 0]]
odd0 = mk({(0,): [[0, "z"], [1, 0]], (1,): zrow})
a0 = odd0
a1 = odd0
conn = default_connection(P)
conns = {P: conn}


def show(tag, coch):
    ent = coch.entries.get((0, 1))
    if ent is None:
        print(tag, ": (0,1) absent")
        return
    terms = {k: f for k, f in ent.terms.items() if k[3] == 0}
    if not terms:
        print(tag, ": (0,1) u^0 zero")
        return
    parts = []
    for k in sorted(terms):
        f = terms[k]
        parts.append(f"[{k[0]},{k[1]}] idx={k[2]} {f}")
    print(tag, ": (0,1) u^0 ", "; ".join(parts))


x = HochschildChain.single(cat, trunc, 3, a0, (a1,))
lhs = total_differential(tr_nabla(x, conns))
show("LHS total", lhs)

trx = tr_nabla(x, conns)
show("tr(x) itself", trx)

# b2 pieces, replicating hochschild_b signs for |a0|=|a1|=1
m_merge = cat.compose(a0, a1).scale(-1)
m_wrap = cat.compose(a1, a0).scale(-1)
y_merge = HochschildChain.single(cat, trunc, 3, m_merge)
y_wrap = HochschildChain.single(cat, trunc, 3, m_wrap)
show("tr(merge -a0a1)", tr_nabla(y_merge, conns))
show("tr(wrap  -a1a0)", tr_nabla(y_wrap, conns))

# b1 pieces with slot signs (+1 for head, +1 for slot here)
da0 = hom_differential(a0)
da1 = hom_differential(a1)
y_head = HochschildChain.single(cat, trunc, 3, da0, (a1,))
y_slot = HochschildChain.single(cat, trunc, 3, a0, (da1,))
show("tr(d(a0)[a1])", tr_nabla(y_head, conns))
show("tr(a0[d(a1)])", tr_nabla(y_slot, conns))

# split b1 pieces: cech part vs delta part
da0_cech = MorphismCochain(P, P, cech_differential(a0.cochain))
da0_delta = da0 - da0_cech
da1_cech = MorphismCochain(P, P, cech_differential(a1.cochain))
da1_delta = da1 - da1_cech
show("  head cech part", tr_nabla(HochschildChain.single(cat, trunc, 3, da0_cech, (a1,)), conns))
show("  head delta part", tr_nabla(HochschildChain.single(cat, trunc, 3, da0_delta, (a1,)), conns))
show("  slot cech part", tr_nabla(HochschildChain.single(cat, trunc, 3, a0, (da1_cech,)), conns))
show("  slot delta part", tr_nabla(HochschildChain.single(cat, trunc, 3, a0, (da1_delta,)), conns))

bx = hochschild_b(x, curved=False)
show("tr(b x) total", tr_nabla(bx, conns))
Bx = connes_B(x)
show("tr(B x)*u", tr_nabla(Bx, conns).shift_u(1))

rhs = tr_nabla(bx + Bx.shift_u(1), conns)
show("RHS total", rhs)
show("LHS-RHS", lhs - rhs)
