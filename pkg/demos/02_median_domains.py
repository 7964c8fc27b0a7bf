"""
Event structures from directed median graphs
============================================

Pick a basepoint; each Θ class becomes an event and each vertex the set of
classes crossed on the way to it.
"""

from npcevents import median_events as me

grid = me.grid_fragment(3)
ef = me.events_from_filter(grid, s=4)
print("grid 3x3:", ef.n, "events")
for i in range(ef.n):
    print("  ", ef.events[i], [ef.relation(i, j) for j in range(ef.n)])

tree = me.tree_fragment(2, 2)
ef = me.events_from_filter(tree, s=2)
print("binary tree: concurrency anywhere?", bool(ef.concurrent.any()))
print("largest natural clique:", me.natural_clique_max(ef)[0])

# reading configurations back gives the vertices
ef = me.events_from_filter(me.grid_fragment(4), s=6)
print("round trip:", me.domain_roundtrip(ef, 6).status)

# flats and thinness
print("grid flat:", me.flat_grid_max(me.grid_fragment(4))[0], "  four-point delta:", me.four_point_delta(me.grid_fragment(4)))
print("tree flat:", me.flat_grid_max(tree)[0], "  four-point delta:", me.four_point_delta(tree))
