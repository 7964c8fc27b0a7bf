import pytest

from npcevents import special
from npcevents.complex_core import bundled

EXPECTED = {
    "torus": set(),
    "rose": set(),
    "single_square": set(),
    "mobius": {"b"},
    "self_intersect": {"a"},
    "direct_osculation": {"c"},
    "inter_osculation": {"e"},
    "wise_x": {"c"},
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_harmful_pathologies(name):
    kinds = special.detect_pathologies(bundled(name)).kinds() - {"d"}
    assert kinds == EXPECTED[name]
    assert special.check_special(bundled(name)).ok == (not EXPECTED[name])


def test_torus_hyperplanes():
    hps = special.base_hyperplanes(bundled("torus"))
    assert [h.edges for h in hps] == [("a",), ("b",)]
    assert all(h.two_sided for h in hps)
    assert special.intersecting_pairs(bundled("torus")) == {frozenset(("H:a", "H:b"))}


def test_wise_x_has_two_hyperplanes():
    hps = special.base_hyperplanes(bundled("wise_x"))
    assert sorted(len(h.edges) for h in hps) == [2, 3]


def test_mobius_hyperplane_is_one_sided():
    rep = special.detect_pathologies(bundled("mobius"))
    assert len(rep.b) == 1 and set(rep.b[0]["edges"]) == {"e0", "e1", "e2"}


def test_first_witness_reported():
    v = special.check_special(bundled("self_intersect"))
    assert v.witness["pathology"] == "a"
    assert v.witness["witness"]["hyperplane"] == "H:e"
