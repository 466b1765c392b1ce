import numpy as np
import pytest

from pushpull.graph import RawEdges, build_graph


def graph_from(edges, n=None):
    return build_graph(RawEdges.from_pairs(edges, n))


@pytest.fixture
def path4():
    return graph_from([(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def tri():
    # source 0: 0->2 (2) then 2->1 (1) beats the direct 0->1 (5)
    return graph_from([(0, 1, 5.0), (0, 2, 2.0), (2, 1, 1.0)])


@pytest.fixture
def two_pairs():
    return graph_from([(0, 1), (2, 3)])


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
