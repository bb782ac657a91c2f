import random
import sys

sys.path.insert(0, "tests")

from mfchern.geometry import build_scheme
from mfchern.hochschild import GeometricCategory, HochschildChain
from mfchern.mf import koszul_mf
from tests.test_geometry import affine_line_squared
from tests.test_hochschild import random_morphism

sch = build_scheme(affine_line_squared())
P = koszul_mf(sch, [["x"]], [["x"]])
cat = GeometricCategory(sch, 2)
rng = random.Random(77)

trunc, cap, max_n, nstrings, nterms = 2, 6, 2, 2, 3
for trial in range(60):
    items = []
    for _ in range(nstrings):
        n = rng.randint(0, max_n)
        route = [P for _ in range(n + 1)]
        slots = []
        for j in range(1, n + 1):
            src = route[j + 1] if j < n else route[0]
            slots.append(
                random_morphism(rng, src, route[j], rng.randint(0, 1), trunc, nterms=nterms)
            )
        src0 = route[1] if n >= 1 else route[0]
        a0 = random_morphism(rng, src0, route[0], rng.randint(0, 1), trunc, nterms=nterms)
        items.append((1, rng.randint(0, 1), a0, tuple(slots)))
    for (c, m, a0, slots) in items:
        for a in (a0,) + slots:
            if not a.is_zero() and a.parity() is None:
                print("trial", trial, "inhomogeneous entry:")
                print(a.cochain.canonical_string())
                sys.exit(0)
    try:
        HochschildChain(cat, trunc, cap, items)
    except AssertionError as e:
        print("trial", trial, "constructor error:", e)
        for (c, m, a0, slots) in items:
            print(" string n=%d u^%d" % (len(slots), m))
            for a in (a0,) + slots:
                print("  entry parity", a.parity(), "zero", a.is_zero())
        sys.exit(0)
print("no failure in 60 trials")
