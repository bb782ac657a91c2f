import random
import sys

sys.path.insert(0, "tests")

from mfchern.cohomology import total_differential
from mfchern.hochschild import (
    GeometricCategory,
    HochschildChain,
    connes_B,
    hochschild_b,
    tr_nabla,
)
from tests.test_hochschild import line_objects, random_chain, random_connection

sch, objects = line_objects()
trunc = 3
cat = GeometricCategory(sch, trunc)
rng = random.Random(20260819)

for trial in range(5):
    conns = {P: random_connection(rng, P, trunc) for P in objects}
    x = random_chain(rng, cat, objects, trunc, 4, max_n=2)
    if trial < 4:
        continue
    # split into single strings
    for (m, a0, slots) in x.items():
        single = HochschildChain(cat, trunc, 4, [(1, m, a0, slots)])
        lhs = total_differential(tr_nabla(single, conns))
        image = hochschild_b(single, curved=True) + connes_B(single).shift_u(1)
        rhs = tr_nabla(image, conns)
        diff = lhs - rhs
        print(
            "string n=%d u^%d parities=%s routes=%s"
            % (
                len(slots),
                m,
                [a.parity() for a in (a0,) + slots],
                [(cat.object_key(a.source), cat.object_key(a.target)) for a in (a0,) + slots],
            )
        )
        default = all(
            conns[P].matrices[i].is_zero()
            for P in {a0.source, a0.target}
            for i in range(sch.npatches())
        )
        print("  connections zero:", default)
        if diff.is_zero():
            print("  OK")
        else:
            print("  FAIL residual:")
            print("   ", diff.canonical_string().replace("\n", "\n    "))
