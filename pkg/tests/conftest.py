import numpy as np
import pytest

from overlap_spread import Graph


def make_path3(w=0.05):
    return Graph.from_edges([(1, 2), (2, 3)], edge_weight=w)


def make_triangle(w=0.05):
    return Graph.from_edges([(1, 2), (2, 3), (1, 3)], edge_weight=w)


def make_star(leaves=3, w=0.05):
    return Graph.from_edges([(0, k) for k in range(1, leaves + 1)], edge_weight=w)


def make_tree5(w=0.3):
    return Graph.from_edges([(0, 1), (1, 2), (1, 3), (3, 4)], edge_weight=w)


def random_graph(seed, n_max=10, p=0.3, w=0.3, nw=1.0):
    """Seeded Erdos-Renyi-style fixture; may be disconnected or edgeless."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max + 1))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph.from_edges(pairs, node_ids=range(n), edge_weight=w, node_weight=nw)


@pytest.fixture
def path3():
    return make_path3()


@pytest.fixture
def triangle():
    return make_triangle()


@pytest.fixture
def star3():
    return make_star(3)


@pytest.fixture
def tree5():
    return make_tree5()
