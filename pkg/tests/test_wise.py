import itertools

import pytest

from npcevents import cover, tiles, wise
from npcevents.complex_core import check_csc, check_npc
from npcevents.errors import TranscriptionIncomplete

from conftest import quadrant


def test_counts(X, W):
    assert X.counts() == (1, 5, 6)
    assert W.counts() == (27, 49, 24)
    assert check_csc(X).ok and check_npc(W).ok


def test_small_words():
    assert sorted(wise.row_words(1, 2)) == ["x", "y"]
    words = wise.row_words(2, 4)
    assert words[0] == "yy" and len(set(words)) == 4
    assert set(wise.row_words(3, 8)) == {"".join(p) for p in itertools.product("xy", repeat=3)}


@pytest.mark.parametrize("n,m", [(1, 1), (3, 2), (4, 5), (6, 3)])
def test_words_agree_with_tiling_search(n, m):
    # the patch with bottom y^n and left c^m is forced; its top row is M_n(m)
    T = wise.wise_tileset()
    t = tiles.tile_patch(T, n, m, {"bottom": ["y"] * n, "left": ["c"] * m})
    by = {s.name: s for s in T.tiles}
    assert "".join(by[c].n for c in t.grid[-1]) == wise.row_word(n, m)


def test_quadrant_is_incremental():
    big = wise.quadrant(4, 6)
    small = wise.quadrant(4, 5)
    assert big.rows[:6] == small.rows
    assert big.cells[:5] == small.cells
    assert all(c.startswith(s) for c, s in zip(big.columns, small.columns))


def test_quadrant_edges():
    q = wise.quadrant(0, 3)
    assert q.rows == ["", "", "", ""]
    with pytest.raises(ValueError):
        wise.quadrant(-1, 2)


def test_period_doubling():
    pd = wise.period_doubling_check(8)
    assert pd.ok and [d for _, d, _ in pd.levels] == [2 ** n for n in range(1, 9)]
    with pytest.raises(ValueError):
        wise.period_doubling_check(0)


def test_deterministic_mutations_fail_early():
    T = wise.wise_tileset()
    muts = wise.mutations(T, "side") + wise.mutations(T, "swap")
    kept = [(d, M) for d, M in muts if tiles.check_4way_deterministic(M).ok]
    assert kept
    for d, M in kept:
        f = wise.first_failure(M, 4)
        assert f is not None, d


def test_missing_tile_stops_transducer():
    T = wise.wise_tileset()
    cut = tiles.TileSet(T.tiles[1:], T.hcolors, T.vcolors)
    with pytest.raises(TranscriptionIncomplete):
        wise.row_word(3, 3, cut)
    assert wise.first_failure(cut, 3) == "incomplete"


def test_quadrant_fragment_reads_the_words():
    q = quadrant(3)
    assert [q.word_from_tips(k) for k in range(8)] == wise.row_words(3, 8)
    assert q.tip_length(0, 0) == wise.TIP_LENGTHS["y"]


def test_quadrant_cells_are_squares_of_w():
    q = quadrant(3)
    # z(k, i) -> z(k, i+1) and z(k, i) -> z(k+1, i) are both length-2 directed paths
    for k in range(3):
        for i in range(2):
            a = q.z(k, i)
            assert q.frag.depth[q.z(k, i + 1)] - q.frag.depth[a] == 2
            assert q.frag.depth[q.z(k + 1, i)] - q.frag.depth[a] == 2
            assert q.frag.depth[q.z(k + 1, i + 1)] - q.frag.depth[a] == 4


def test_degree_profile_matches_base(W):
    b = cover.unfold_filter(W, "v", 6)
    prof = wise.degree_profile(b)
    assert prof == {0: [5], 1: [4, 5], 2: [2], 3: [0, 1]}
    assert wise.base_out_degrees(W) == prof


def test_patch_lifts_to_a_flat(X):
    T = wise.wise_tileset()
    b = cover.unfold_filter(X, "v", 6)
    g = wise.lift_tiling(T, tiles.tile_patch(T, 3, 3), b)
    assert g is not None and len(g) == 16
    assert wise.lift_tiling(T, tiles.tile_patch(T, 4, 4), b) is None


def test_drive_report_schema():
    rep = wise.counterexample_drive(radius=5, depth=2, k_max=5, n=2, labeling_limit=1)
    d = rep.data
    for key in ("complex_counts", "checks", "census", "degree_profile", "natural_clique_max",
                "period_doubling", "labelings", "obstructions"):
        assert key in d
    assert rep.ok
    assert d["degree_profile"]["zero_vertex"] == [5]
    assert d["obstruction"]["witness_count"] == 6
    assert {"labeling_id", "k", "m", "n", "index", "vertex"} <= set(d["obstructions"][0])
    assert all(c["iso"] == "FOUND" for c in d["colored_control"])
