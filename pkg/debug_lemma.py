import random
from mfchern.cech import MatrixForm, acw_product, supertrace, cech_differential, form_derivative
from mfchern.connection import default_connection
from mfchern.hochschild import nabla_bracket
from mfchern.mf import MorphismCochain, hom_differential
from mfchern.rings import parse_scalar
from tests.test_hochschild import proj_objects, random_morphism, random_connection

sch, objects = proj_objects()
P = objects[0]
trunc = 3
par = P.bundle.parities()

def mk(entries):
    built = {}
    for tup, rows in entries.items():
        ring = sch.intersection(tup).ring
        built[tup] = MatrixForm.from_entries(ring, par, par, [[parse_scalar(ring, str(v)) for v in row] for row in rows])
    return MorphismCochain.from_entries(P, P, built, trunc)

zrow = [[0, 0], [0, 0]]
cases = {
    "odd0": mk({(0,): [[0, "z"], [1, 0]], (1,): zrow}),
    "even0": mk({(0,): [["z", 0], [0, "z^2"]], (1,): zrow}),
    "c1odd": mk({(0, 1): [["z", 0], [0, "z^-1"]]}),
    "c1even": mk({(0, 1): [[0, "z"], ["z^-2", 0]]}),
}

conn = default_connection(P)
rng = random.Random(5)
randconn = random_connection(rng, P, trunc)

def report(name, resid):
    print(" ", name, "ZERO" if resid.is_zero() else "FAIL")
    if not resid.is_zero():
        print("   ", resid.canonical_string().replace("\n", "\n    "))

for cname, cn in (("default", conn), ("random", randconn)):
    print("== connection:", cname)
    for nm, g in cases.items():
        # (a) delta part: str([delta,g]) = 0; hom_differential = [delta,-] + cech part
        dg = hom_differential(g)
        cech_part = cech_differential(g.cochain)
        delta_part = dg.cochain - cech_part
        report(nm + " (a) str(delta-bracket)", supertrace(delta_part))
        # (b) cech part: str(cech-part) = d_cech(str g)
        report(nm + " (b) cech compat", supertrace(cech_part) - cech_differential(supertrace(g.cochain)))
        # (c) nabla: str(nabla_bracket g) = d(str g)
        nb = nabla_bracket(g.cochain, cn, cn)
        report(nm + " (c) nabla compat", supertrace(nb) - form_derivative(supertrace(g.cochain)))
