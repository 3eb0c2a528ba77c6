import numpy as np
import pytest

from moranopt.graphs import build_graph


def ones(n):
    return [1.0] * n


@pytest.fixture
def k2():
    """Two nodes, one undirected edge, neutral."""
    return build_graph([(0, 1)], False, ones(2), ones(2))


@pytest.fixture
def k3():
    """Complete neutral triangle."""
    return build_graph([(0, 1), (0, 2), (1, 2)], False, ones(3), ones(3))


@pytest.fixture
def star4():
    """Star on 4 nodes, center 0, neutral."""
    return build_graph([(0, 1), (0, 2), (0, 3)], False, ones(4), ones(4))


@pytest.fixture
def path3():
    """Path 0-1-2, neutral."""
    return build_graph([(0, 1), (1, 2)], False, ones(3), ones(3))


@pytest.fixture
def cycle5():
    return build_graph([(i, (i + 1) % 5) for i in range(5)], False, ones(5), ones(5))


def directed_3cycle(weights=((0.6, 0.4), (1.0,), (1.0,))):
    """3-node directed graph: 0->1/0->2 split, 1->2, 2->0."""
    edges = [(0, 1, weights[0][0]), (0, 2, weights[0][1]), (1, 2, 1.0), (2, 0, 1.0)]
    return build_graph(edges, True, ones(3), ones(3))


@pytest.fixture
def diamond_fit():
    """4 nodes with distinct fitness on both sides; undirected diamond."""
    return build_graph(
        [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)],
        False,
        [1.5, 2.0, 0.8, 1.2],
        [1.0, 0.7, 1.1, 0.9],
    )


def rng_of(seed):
    return np.random.default_rng(seed)
