import random
from mfchern.cech import acw_product, cech_differential, form_derivative
from mfchern.connection import default_connection
from mfchern.hochschild import nabla_bracket
from mfchern.mf import MorphismCochain, hom_differential
from tests.test_hochschild import proj_objects, random_morphism, random_connection

sch, objects = proj_objects()
P = objects[0]
trunc = 3
rng = random.Random(11)

def report(name, resid):
    ok = resid.is_zero()
    print(" ", name, "ZERO" if ok else "FAIL")
    if not ok:
        s = resid.canonical_string()
        print("   ", s.replace("\n", "\n    ")[:400])

conn = default_connection(P)
rand = random_connection(rng, P, trunc)

for trial in range(6):
    pa = rng.randrange(2)
    pb = rng.randrange(2)
    a = random_morphism(rng, P, P, pa, trunc, keep=0.9, nterms=3)
    b = random_morphism(rng, P, P, pb, trunc, keep=0.9, nterms=3)
    if a.is_zero() or b.is_zero():
        continue
    ab = acw_product(a.cochain, b.cochain)
    sgn = (-1) ** pa
    # L1 form Leibniz
    r1 = form_derivative(ab) - acw_product(form_derivative(a.cochain), b.cochain) - acw_product(a.cochain, form_derivative(b.cochain)).scale(sgn)
    report(f"t{trial} L1 form d (pa={pa},pb={pb})", r1)
    # L2 cech Leibniz
    r2 = cech_differential(ab) - acw_product(cech_differential(a.cochain), b.cochain) - acw_product(a.cochain, cech_differential(b.cochain)).scale(sgn)
    report(f"t{trial} L2 cech d", r2)
    # L3 nabla bracket Leibniz (endomorphisms of P, same connection both sides)
    for cname, cn in (("dflt", conn), ("rand", rand)):
        nb = lambda c: nabla_bracket(c, cn, cn)
        r3 = nb(ab) - acw_product(nb(a.cochain), b.cochain) - acw_product(a.cochain, nb(b.cochain)).scale(sgn)
        report(f"t{trial} L3 nabla {cname}", r3)
    # L4 hom differential Leibniz
    abm = MorphismCochain(P, P, ab)
    r4 = hom_differential(abm).cochain - acw_product(hom_differential(a).cochain, b.cochain) - acw_product(a.cochain, hom_differential(b).cochain).scale(sgn)
    report(f"t{trial} L4 hom d", r4)
