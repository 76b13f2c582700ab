"""E_1 and E_2 of the Hodge to de Rham spectral sequence on plane weight blocks,
and the tensor splitting of (p, q)-forms."""

from ncx import cohomology as co
from ncx import frolicher as fr
from ncx.models import build

plane = build("theta_plane", 1)
for a, b in [(0, 0), (1, 0), (1, 1), (2, 1)]:
    r = fr.frolicher_check(plane, a, b)
    print(f"({a}, {b})  E1 = {r['E1']}  E2 = {r['E2']}  dR = {r['derham']}"
          f"  euler agrees = {r['euler_agrees']}")

amb = plane.ambient
form = amb.dfn("zb0") * amb.dfn("z0") * amb.dfn("zb1")
t = co.theta_pq(plane, form)
print(form, "->", t)
print("wedge back:", co.wedge_tensor(t) == form)
