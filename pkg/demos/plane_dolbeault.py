"""Complex structure and cohomology on the theta-deformed plane C^2_theta."""

from ncx import acs
from ncx import cohomology as co
from ncx.models import build

plane = build("theta_plane", 1)
c = plane.calc
z0, z1, dz0, dz1 = c.fn("z0"), c.fn("z1"), c.dfn("z0"), c.dfn("z1")

# the coordinates q-commute, and so do their differentials
print("dz1 z0 =", dz1 * z0)
print("d(z0 z1) =", (z0 * z1).d())

rep = acs.check_integrability(plane)
print("integrable:", rep.integrable, "verdicts:", rep.verdicts)

# per weight block: holomorphic monomials survive, everything else is exact
for a, b in [(0, 0), (2, 0), (1, 1), (2, 2)]:
    print(f"(a, b) = ({a}, {b})  H_dR = {co.derham_dims(plane, a, b)}"
          f"  H^(0,*) = {co.dolbeault_dims(plane, 0, a, b)}")
