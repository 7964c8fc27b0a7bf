import pytest

from npcevents import tiles
from npcevents.errors import PaletteOverlap, ParseError
from npcevents.wise import wise_tileset


def test_parse_and_format():
    T = wise_tileset()
    assert len(T.tiles) == 6
    assert tiles.parse_tiles(tiles.format_tiles(T)) == T
    with pytest.raises(ParseError):
        tiles.parse_tiles("tile A n=u e=p s=u\n")
    with pytest.raises(ParseError):
        tiles.parse_tiles("tile A n=u e=p s=u w=p\ntile A n=u e=p s=u w=p\n")


def test_palette_overlap():
    T = tiles.parse_tiles("hcolor u\nvcolor u\ntile A n=u e=u s=u w=u\n")
    with pytest.raises(PaletteOverlap):
        T.validate()


def test_wise_tiles_are_4way_deterministic():
    T = wise_tileset()
    assert tiles.check_4way_deterministic(T).ok
    assert tiles.corner_roles_complete(T)


def test_nondeterministic_corner_reported():
    T = tiles.parse_tiles("tile A n=u e=p s=u w=p\ntile B n=u e=q s=u w=p\n")
    v = tiles.check_4way_deterministic(T)
    assert not v.ok and v.witness["corner"] == "NW"


def test_complex_from_tiles():
    X = tiles.complex_from_tiles(wise_tileset())
    assert X.counts() == (1, 5, 6)


@pytest.mark.parametrize("n", [1, 4, 10])
def test_patches(n):
    T = wise_tileset()
    t = tiles.tile_patch(T, n, n)
    assert t is not None and tiles.verify_tiling(T, t)


def test_patch_with_boundary():
    T = wise_tileset()
    t = tiles.tile_patch(T, 3, 2, {"bottom": ["y", "y", "y"], "left": ["c", "c"]})
    assert [T.tiles[[s.name for s in T.tiles].index(c)].s for c in t.grid[0]] == ["y", "y", "y"]


def test_mismatch_is_unsat():
    T = tiles.load_tiles("mismatch.tiles")
    assert tiles.tile_patch(T, 2, 1) is None
    assert tiles.tile_patch(T, 1, 2) is not None


def test_single_tile_is_periodic():
    T = tiles.load_tiles("single.tiles")
    rep = tiles.aperiodicity_probe(T, 5, 2)
    assert rep.largest_patch == 5 and (1, 1) in rep.tori
    assert rep.verdict == "periodic"


def test_torus_tilings_verify():
    T = wise_tileset()
    t = tiles.tile_torus(T, 4, 6)
    assert t is not None and tiles.verify_tiling(T, t)
    assert tiles.tile_torus(T, 1, 1) is None


def test_torus_order():
    order = tiles.torus_order(3)
    assert order[0] == (1, 1) and order[-1] == (3, 3) and len(order) == 9


def test_bad_sizes():
    with pytest.raises(ValueError):
        tiles.tile_patch(wise_tileset(), 0, 3)
    with pytest.raises(ValueError):
        tiles.tile_torus(wise_tileset(), 2, 0)
