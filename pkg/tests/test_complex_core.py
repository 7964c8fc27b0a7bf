import pytest

from npcevents import complex_core as cc
from npcevents.errors import MissingTags, ParseError, UnknownVertex, ValidationError


def test_parse_format_roundtrip():
    for name in ("torus", "wise_x", "mobius", "single_square", "direct_osculation"):
        c = cc.bundled(name)
        again = cc.parse_complex(cc.format_complex(c))
        assert cc.format_complex(again) == cc.format_complex(c)
        assert cc.complex_from_dict(cc.complex_to_dict(c)).counts() == c.counts()


def test_parse_errors():
    with pytest.raises(ParseError):
        cc.parse_complex("vertex v\nedge a v\n")
    with pytest.raises(ParseError):
        cc.parse_complex("vertex v\nedge a v v\nsquare a + a + a * a -\n")
    with pytest.raises(ParseError):
        cc.parse_complex("polygon v\n")
    with pytest.raises(ValidationError):
        cc.parse_complex("vertex v\nvertex w\nedge a v w\nsquare a + a + a - a -\n")
    with pytest.raises(ValidationError):
        cc.parse_complex("vertex v\nedge a v w\n")


def test_torus_link_is_a_4_cycle():
    c = cc.bundled("torus")
    lk = cc.vertex_link(c, "v")
    assert len(lk.nodes) == 4
    adj = lk.adjacency()
    assert all(len(adj[n]) == 2 for n in lk.nodes)
    with pytest.raises(UnknownVertex):
        cc.vertex_link(c, "nowhere")


def test_npc_rejects_missing_cube():
    v = cc.check_npc(cc.bundled("three_squares"))
    assert not v.ok and v.witness["kind"] == "triangle"
    assert cc.check_npc(cc.bundled("wise_x")).ok


def test_npc_rejects_double_corner():
    c = cc.parse_complex("vertex v\nedge a v v\nedge b v v\n"
                         "square a + b + a - b -\nsquare a + b + a - b -\n")
    v = cc.check_npc(c)
    assert not v.ok and v.witness["kind"] == "double"


def test_vh_and_csc():
    X = cc.bundled("wise_x")
    assert cc.check_vh(X).ok
    v = cc.check_csc(X)
    # every (vertical, horizontal) end pair spans exactly one corner
    assert v.ok and v.info["unique"]
    with pytest.raises(MissingTags):
        cc.check_csc(cc.bundled("rose"))
    # a lone square is complete: each vertex has one V end and one H end
    assert cc.check_csc(cc.bundled("single_square")).ok


def test_admissible_orientation():
    assert cc.check_admissible_orientation(cc.bundled("torus")).ok
    v = cc.check_admissible_orientation(cc.bundled("mobius"))
    assert not v.ok and v.witness == {"square": 2}


def test_parallelism_on_mobius_conflicts():
    classes, flip, conflicts = cc.parallelism(cc.bundled("mobius"))
    assert len(set(classes[e] for e in ("e0", "e1", "e2"))) == 1
    assert conflicts == [classes["e0"]]
    classes, flip, conflicts = cc.parallelism(cc.bundled("torus"))
    assert conflicts == [] and classes["a"] != classes["b"]


def test_parity_union_find():
    uf = cc.ParityUnionFind("abcd")
    assert uf.union("a", "b", 1)
    assert uf.union("b", "c", 1)
    assert uf.parity("a") ^ uf.parity("c") == 0
    assert not uf.union("a", "c", 1)
    assert uf.union("c", "d", 0)


def test_subdivision_counts(W):
    X = cc.bundled("wise_x")
    B = cc.barycentric_subdivision(X)
    # one vertex per cell; each edge splits in two, each square gets 4 spokes
    assert B.counts() == (1 + 5 + 6, 2 * 5 + 4 * 6, 4 * 6)
    assert W.counts() == (27, 49, 24)
    types = sorted(W.types.values())
    assert [types.count(t) for t in range(4)] == [1, 5, 6, 15]
    assert cc.check_npc(B).ok and cc.check_admissible_orientation(W).ok


def test_tips_hang_off_midpoints(W):
    tip_edges = [e for e in W.edges if W.types.get(e.dst) == 3]
    assert len(tip_edges) == 15
    for e in tip_edges:
        assert W.types[e.src] in (1, 3)


def test_without_square():
    X = cc.bundled("wise_x")
    Y = cc.without_square(X, 0)
    assert Y.counts() == (1, 5, 5)
    assert not cc.check_csc(Y).ok


def test_verdict_text_and_dict():
    v = cc.Verdict(False, "npc", {"vertex": "v"})
    assert not v and v.status == "FAIL"
    assert v.text().startswith("npc: FAIL")
    assert v.to_dict()["witness"] == {"vertex": "v"}
