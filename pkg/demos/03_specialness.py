"""
Hyperplane pathologies and trace labelings
==========================================

Label each edge by its hyperplane. The label set is a trace alphabet where
crossing hyperplanes commute; each pathology breaks a specific axiom.
"""

from npcevents import labeling, special
from npcevents.complex_core import bundled

for name in ("torus", "single_square", "self_intersect", "direct_osculation",
             "inter_osculation", "wise_x"):
    c = bundled(name)
    kinds = sorted(special.detect_pathologies(c).kinds() - {"d"})
    trace = labeling.hyperplane_trace_check(c, radius=4)
    print(f"{name:18s} pathologies={kinds!s:10s} violated={trace.info['violated']}")

mob = special.check_special(bundled("mobius"))
print("mobius:", mob.text())
