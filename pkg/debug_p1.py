import random
from mfchern.cech import MatrixForm
from mfchern.cohomology import total_differential
from mfchern.connection import default_connection
from mfchern.hochschild import GeometricCategory, HochschildChain, hochschild_b, connes_B, tr_nabla
from mfchern.mf import MorphismCochain
from mfchern.rings import parse_scalar
from tests.test_hochschild import proj_objects, random_connection

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

def check(tag, a0, slots, conn):
    y = HochschildChain.single(cat, trunc, 3, a0, slots)
    conns = {P: conn}
    lhs = total_differential(tr_nabla(y, conns))
    image = hochschild_b(y, curved=False) + connes_B(y).shift_u(1)
    rhs = tr_nabla(image, conns)
    diff = lhs - rhs
    print(tag, "->", "ZERO" if diff.is_zero() else "FAIL")
    if not diff.is_zero():
        print(diff.canonical_string())

one = MorphismCochain.identity(P, trunc)
zrow = [[0, 0], [0, 0]]
odd0 = mk({(0,): [[0, "z"], [1, 0]], (1,): zrow})
even0 = mk({(0,): [["z", 0], [0, "z^2"]], (1,): zrow})
c1odd = mk({(0, 1): [["z", 0], [0, "z^-1"]]})
c1even = mk({(0, 1): [[0, "z"], ["z^-2", 0]]})

dflt = default_connection(P)
rng = random.Random(7)
rand = random_connection(rng, P, trunc)

for cname, conn in (("default", dflt), ("random", rand)):
    print("== connection:", cname)
    check(" 1[odd0]", one, (odd0,), conn)
    check(" 1[even0]", one, (even0,), conn)
    check(" 1[c1odd]", one, (c1odd,), conn)
    check(" 1[c1even]", one, (c1even,), conn)
    check(" odd0[odd0]", odd0, (odd0,), conn)
    check(" odd0[even0]", odd0, (even0,), conn)
    check(" c1odd alone", c1odd, (), conn)
    check(" odd0[c1even]", odd0, (c1even,), conn)
    check(" c1odd[even0]", c1odd, (even0,), conn)
