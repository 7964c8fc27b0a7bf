"""
Tiles and the plane
===================
"""

from npcevents import cover, tiles, wise

T = wise.wise_tileset()
print(tiles.check_4way_deterministic(T).text())
patch = tiles.tile_patch(T, 6, 4)
print(patch.text())

# a 4x4 patch is a flat square grid in the cover
b = cover.unfold_filter(wise.build_X(T), "v", 8)
g = wise.lift_tiling(T, tiles.tile_patch(T, 4, 4), b)
print("lifted grid vertices:", len(g))

rep = tiles.aperiodicity_probe(T, 8, 4)
print(rep.to_dict())
