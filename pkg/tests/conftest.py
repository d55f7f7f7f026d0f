import pytest

from abmv import reductions as red
from abmv.core import Election


@pytest.fixture
def example1_election():
    """Nine candidates, seven honest votes, three would-be manipulators."""
    candidates = ["x", "y", "z", "a", "b", "c", "d1", "d2", "d3"]
    honest = [{"x", "y", "z", "a"}] * 4 + [{"x", "y", "z", "d3"}] * 3
    manipulative = [{"a", "b", "d1"}, {"a", "c", "d2"}, {"b", "c"}]
    return candidates, honest, manipulative


@pytest.fixture
def example1_full(example1_election):
    candidates, honest, manipulative = example1_election
    return Election(candidates, honest + manipulative)


@pytest.fixture
def k4():
    def build(kappa):
        vertices = ["a", "b", "c", "d"]
        edges = [(u, v) for i, u in enumerate(vertices) for v in vertices[i + 1:]]
        return red.GraphInstance(vertices, edges, kappa)

    return build


@pytest.fixture
def trivial_rx3c():
    return red.Rx3cInstance(["a1", "a2", "a3"], [("a1", "a2", "a3")] * 3)
