"""
Universal covers by unfolding
=============================

A one-vertex complex with one square is a torus; its cover is the plane.
Wise's six squares give a complex whose cover is a product of two trees.
"""

from npcevents import cover
from npcevents.complex_core import bundled, check_csc, check_npc

torus = bundled("torus")
b = cover.unfold_ball(torus, "v", 3)
print("torus ball of radius 3:", b.counts(), "(vertices, edges, squares)")

# a closed loop downstairs lifts to a closed loop when it is a relation
path = cover.lift_path(b, "a b a- b-")
print("commutator lifts back to the start:", path[0] == path[-1])

X = bundled("wise_x")
print("X is NPC:", check_npc(X).ok, " complete:", check_csc(X).ok)

# two builders, one answer
for r in range(1, 5):
    slow = cover.unfold_ball(X, "v", r)
    fast = cover.unfold_csc_product(X, "v", r)
    same = cover.isomorphism_over_base(slow, fast) is not None
    print(f"radius {r}: {slow.counts()[0]:5d} vertices, product builder agrees: {same}")

# every vertex of the cover has the same colored future
f = cover.unfold_filter(X, "v", 5)
print("filter types at depth 2:", cover.filter_type_census(f, 2).count)
