import itertools

from hypothesis import HealthCheck, given, settings, strategies as st

from npcevents import cover, median_events as me, tiles, wise
from npcevents.complex_core import ParityUnionFind, check_csc, check_npc, format_complex, parse_complex

H, V = ("x", "y"), ("a", "b", "c")


@st.composite
def tile_sets(draw):
    n = draw(st.integers(1, 6))
    sides = draw(st.lists(st.tuples(st.sampled_from(H), st.sampled_from(V),
                                    st.sampled_from(H), st.sampled_from(V)),
                          min_size=n, max_size=n, unique=True))
    ts = [tiles.Tile(f"t{i}", *s) for i, s in enumerate(sides)]
    return tiles.TileSet(ts, H, V)


@settings(max_examples=60, deadline=None)
@given(tile_sets())
def test_npc_iff_4way_deterministic(T):
    X = tiles.complex_from_tiles(T)
    assert check_npc(X).ok == tiles.check_4way_deterministic(T).ok


@settings(max_examples=60, deadline=None)
@given(tile_sets())
def test_csc_iff_corner_roles_complete(T):
    X = tiles.complex_from_tiles(T)
    if tiles.check_4way_deterministic(T).ok:
        assert check_csc(X).ok == tiles.corner_roles_complete(T)


@settings(max_examples=40, deadline=None)
@given(tile_sets())
def test_tile_complex_text_roundtrip(T):
    X = tiles.complex_from_tiles(T)
    assert format_complex(parse_complex(format_complex(X))) == format_complex(X)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(tile_sets(), st.integers(1, 4), st.integers(1, 4))
def test_patches_verify(T, w, h):
    t = tiles.tile_patch(T, w, h)
    if t is not None:
        assert tiles.verify_tiling(T, t)


@settings(max_examples=25, deadline=None)
@given(tile_sets())
def test_balls_of_npc_tile_complexes_are_covers(T):
    X = tiles.complex_from_tiles(T)
    if not check_npc(X).ok:
        return
    b = cover.unfold_ball(X, "v", 2)
    assert cover.check_covering_condition(b).ok
    frag = me.fragment_from_ball(b)
    assert me.median_check(frag).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5))
def test_grid_domain_roundtrip(n, m):
    frag = me.grid_fragment(n, m)
    ef = me.events_from_filter(frag, s=n + m)
    assert me.event_axioms(ef).ok
    assert me.domain_roundtrip(ef, n + m - 2).ok
    assert len(me.enumerate_configurations(ef, n + m)) == n * m


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3))
def test_tree_has_no_concurrency(b, d):
    ef = me.events_from_filter(me.tree_fragment(b, d), s=d)
    assert not ef.concurrent.any()
    assert me.four_point_delta(me.tree_fragment(b, d)) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 9), st.integers(0, 60))
def test_words_are_prefix_stable(n, m):
    assert wise.row_word(n + 1, m).startswith(wise.row_word(n, m))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 1)), max_size=12))
def test_parity_union_find_matches_brute_force(rels):
    uf = ParityUnionFind(range(6))
    accepted = []
    for a, b, r in rels:
        if uf.union(a, b, r):
            accepted.append((a, b, r))
    # brute force: some 0/1 assignment satisfies every accepted relation
    sols = [p for p in itertools.product((0, 1), repeat=6)
            if all(p[a] ^ p[b] == r for a, b, r in accepted)]
    assert sols
    for a, b, r in rels:
        if (a, b, r) not in accepted:
            assert all(p[a] ^ p[b] != r for p in sols)
