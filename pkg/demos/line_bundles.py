"""Holomorphic line modules over CP^1_theta and their long exact sequences."""

from ncx import holmod as hm
from ncx.models import build

proj = build("theta_projective", 1)

for m in (-2, -1, 0, 1, 2, 3):
    E = hm.DbarModule.line(proj, m)
    res = hm.module_cohomology(E, windows=(3, 4))
    flat = hm.block_curvature_zero(E, 4)
    print(f"L_{m:<2}  H = {res.dims[:2]}  stable = {res.stable}  holomorphic = {flat}")

# right multiplication by z0 embeds L_m into L_{m+1}
for m in (0, 1, 2):
    rep = hm.ses_les_check(proj, m, windows=(4,))[4]
    print(f"0 -> L_{m} -> L_{m + 1} -> coker -> 0:",
          " -> ".join(str(n["dim"]) for n in rep.to_json()["nodes"]), " exact:", rep.ok)

sphere = build("theta_sphere", 1)
cert = hm.strongly_graded_check(sphere, 1)
print("1 = sum s_i a_i with s_i in L_1:", cert["certificate"])
