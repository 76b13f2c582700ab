"""A star-compatible almost complex structure that is not integrable."""

from ncx import acs
from ncx.models import build

plane = build("theta_plane", 1)
j = acs.conjugated_acs(plane.calc)
print("axiom failures:", acs.verify_axioms(j, plane.is_zero, raise_on_failure=False))
rep = acs.check_integrability(plane, j)
for test, ok in sorted(rep.verdicts.items()):
    print(test, "vanishes" if ok else "fails")
    for letter, res in sorted(rep.residuals[test].items()):
        print("   ", letter, ":", res)
