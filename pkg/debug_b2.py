import itertools
from fractions import Fraction

from mfchern.cech import MatrixForm
from mfchern.geometry import build_scheme
from mfchern.hochschild import GeometricCategory, HochschildChain, hochschild_b
from mfchern.mf import MorphismCochain, koszul_mf

import sys
sys.path.insert(0, "tests")
from tests.test_geometry import affine_line_squared

sch = build_scheme(affine_line_squared())
P = koszul_mf(sch, [["x"]], [["x"]])
ring = sch.patch_ring(0)
x = ring.var("x")
par = P.bundle.parities()

def endo(r, c, val):
    mf = MatrixForm(ring, par, par, {(r, c, (), 0): val})
    return MorphismCochain.from_entries(P, P, {(0,): mf}, 2)

# parity-0 and parity-1 generators with nonzero differential
evens = [endo(0, 0, x), endo(1, 1, x)]
odds = [endo(0, 1, x), endo(1, 0, x * x)]

def pick(p, which):
    return (evens if p == 0 else odds)[which]

cat = GeometricCategory(sch, 2)

bad = 0
for n in (1, 2):
    for ps in itertools.product((0, 1), repeat=n + 1):
        for which in itertools.product((0, 1), repeat=n + 1):
            a0 = pick(ps[0], which[0])
            slots = tuple(pick(ps[j], which[j]) for j in range(1, n + 1))
            ch = HochschildChain.single(cat, 2, 6, a0, slots)
            bb = hochschild_b(hochschild_b(ch))
            if not bb.is_zero():
                bad += 1
                if bad <= 3:
                    print(f"n={n} parities={ps} which={which}")
                    print("  b^2 strings:")
                    for (m, b0, bslots) in bb.items():
                        print(
                            "   ",
                            len(bslots),
                            "slots:",
                            b0.cochain.canonical_string().replace("\n", "; "),
                            "|",
                            [s.cochain.canonical_string().replace("\n", "; ") for s in bslots],
                        )
print("bad cases:", bad)
