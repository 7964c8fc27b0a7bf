import functools

import pytest

from npcevents import cover, median_events, wise
from npcevents.complex_core import bundled


@functools.lru_cache(maxsize=None)
def ball(name, r, directed=False):
    c = bundled(name)
    v = c.vertices[0]
    if directed:
        return cover.unfold_filter(c, v, r)
    return cover.unfold_ball(c, v, r)


@functools.lru_cache(maxsize=None)
def w_filter(depth):
    return cover.unfold_filter(wise.build_W(), "v", depth)


@functools.lru_cache(maxsize=None)
def quadrant(n=3):
    return wise.QuadrantFragment(n, 2 ** n - 1)


@pytest.fixture
def X():
    return wise.build_X()


@pytest.fixture
def W():
    return wise.build_W()


@pytest.fixture
def grid4():
    return median_events.grid_fragment(4)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
