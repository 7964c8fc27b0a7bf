import pytest

from npcevents import cover
from npcevents.complex_core import bundled
from npcevents.errors import (DepthExceedsBall, DifferentFibers, LeavesBall, ResourceLimit,
                              UnknownVertex)

from conftest import ball


def tree_product_count(r, h_gens=2, v_gens=3):
    """Vertices at l1 distance <= r in T(2h) x T(2v), counted directly."""
    def sphere(gens, i):
        return 1 if i == 0 else 2 * gens * (2 * gens - 1) ** (i - 1)
    return sum(sphere(h_gens, i) * sphere(v_gens, j)
               for i in range(r + 1) for j in range(r + 1 - i))


def test_torus_ball_is_an_l1_diamond():
    b = ball("torus", 2)
    # Z^2 ball of radius 2 has 13 points, 5 of them strictly inside
    assert b.counts()[0] == 13
    assert sum(b.interior.values()) == 5
    assert cover.check_covering_condition(b).ok


def test_rose_ball_is_a_tree():
    b = ball("rose", 2)
    assert b.counts() == (17, 16, 0)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_wise_ball_counts_match_tree_product(r):
    assert ball("wise_x", r).counts()[0] == tree_product_count(r)


def test_product_builder_agrees_with_unfolder():
    X = bundled("wise_x")
    for r in (1, 2, 3):
        b1 = ball("wise_x", r)
        b2 = cover.unfold_csc_product(X, "v", r)
        assert cover.isomorphism_over_base(b1, b2) is not None
        assert cover.ball_signature(b1) == cover.ball_signature(b2)


def test_isomorphism_over_base_sees_radius():
    assert cover.isomorphism_over_base(ball("wise_x", 1), ball("wise_x", 2)) is None


def test_lift_path_closes_commutator_in_torus():
    b = ball("torus", 3)
    path = cover.lift_path(b, "a b a- b-")
    assert path[-1] == b.basepoint and len(set(path)) == 4


def test_lift_path_leaves_ball():
    b = ball("torus", 1)
    with pytest.raises(LeavesBall):
        cover.lift_path(b, "a a")
    with pytest.raises(UnknownVertex):
        cover.lift_path(b, "a", start="elsewhere")


def test_parse_walk():
    assert cover.parse_walk("y c- a+") == [("y", 1), ("c", -1), ("a", 1)]


def test_deck_transport_on_torus():
    b = ball("torus", 3)
    u = cover.lift_path(b, "a")[-1]
    d = cover.deck_transport(b, b.basepoint, u)
    assert d.vertices[b.basepoint] == u
    x = cover.lift_path(b, "b")[-1]
    assert d.vertices[x] == cover.lift_path(b, "a b")[-1]


def test_deck_transport_needs_one_fiber():
    b = ball("single_square", 1)
    v = b.basepoint
    w = b.out(v)[0][1]
    with pytest.raises(DifferentFibers):
        cover.deck_transport(b, v, w)


def test_budget_is_enforced():
    with pytest.raises(ResourceLimit):
        cover.unfold_ball(bundled("wise_x"), "v", 6, budget=1000)


def test_census_on_uncoloured_x_has_one_class():
    b = ball("wise_x", 4, directed=True)
    cen = cover.filter_type_census(b, 2, colored=False, typed=False)
    assert cen.count == 1


def test_census_coloured_x():
    b = ball("wise_x", 3, directed=True)
    cen = cover.filter_type_census(b, 1)
    assert cen.count == 1


def test_census_depth_too_big():
    b = ball("torus", 1, directed=True)
    with pytest.raises(DepthExceedsBall):
        cover.filter_type_census(b, 3)


def test_ball_json_roundtrip():
    b = ball("torus", 2)
    again = cover.CoverBall.from_dict(b.to_dict())
    assert cover.ball_signature(again) == cover.ball_signature(b)
    assert again.to_json() == b.to_json()
    assert b.to_dot().startswith("digraph")


def test_directed_filter_has_out_edges_only():
    b = ball("torus", 3, directed=True)
    # the directed filter of Z^2 is the positive quadrant
    assert b.counts()[0] == sum(range(1, 5))
    for v in b.vertices:
        assert len(b.out(v)) == (2 if b.interior[v] else 0)
