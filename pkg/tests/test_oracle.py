"""The oracle itself is validated here against hand-derived route sums; the
engine is later validated against the oracle, keeping the two routes disjoint."""

import math

import numpy as np
import pytest

from overlap_spread import Graph, SpreadParams
from overlap_spread.oracle import (
    OracleReport,
    exhaustive_ism,
    exhaustive_reach,
    percolation_mc,
)
from conftest import make_star, make_tree5, random_graph

SC8 = SpreadParams(model="sc", l_max=8)
CC6 = SpreadParams(model="cc", l_max=6)


# -- hand-derived anchors ----------------------------------------------------


def test_path_single_route(path3):
    r = exhaustive_reach(path3, SC8, [1, 2, 8])
    assert r[1][0, 2] == 0.0
    assert abs(r[2][0, 2] - 0.0025) < 1e-12
    assert abs(r[8][0, 2] - 0.0025) < 1e-12  # no longer routes exist
    assert r[1][0, 1] == 0.05


def test_path_centrality_sums(path3):
    r = exhaustive_reach(path3, SC8, [2])[2]
    assert abs(r[:, 1].sum() - 0.1) < 1e-12  # into the middle node
    assert abs(r[0, :].sum() - 0.0525) < 1e-12  # out of an end node


def test_triangle_sc_two_routes(triangle):
    r = exhaustive_reach(triangle, SC8, [1, 2, 8])
    assert abs(r[1][0, 1] - 0.05) < 1e-15
    assert abs(r[2][0, 1] - 0.052375) < 1e-12
    assert abs(r[8][0, 1] - 0.052375) < 1e-12
    for t in (1, 2, 8):
        off = ~np.eye(3, dtype=bool)
        vals = r[t][off]
        assert np.allclose(vals, vals[0], atol=1e-15)  # vertex-transitive


def test_triangle_cc_vs_sc(triangle):
    rs = exhaustive_reach(triangle, SpreadParams(model="sc", l_max=6), [2, 4])
    rc = exhaustive_reach(triangle, CC6, [2, 4, 6])
    assert rc[2][0, 1] == rs[2][0, 1]  # no cycle fits in 2 steps
    assert rc[4][0, 1] > rs[4][0, 1]  # first reinforcing loop arrived
    # length-4 walks add exactly the w^4 loop route
    assert abs(rc[4][0, 1] - (1 - 0.95 * 0.9975 * (1 - 0.05**4))) < 1e-15
    assert abs(rc[4][0, 1] - 0.05238092265625) < 1e-15
    assert abs(rc[6][0, 1] - 0.05238121878721167) < 1e-12  # frozen oracle value


def test_star_cohesion_sums():
    star = make_star(3)
    r = exhaustive_reach(star, SC8, [2])[2]
    assert abs(r.sum() - 0.315) < 1e-12
    reduced = star.remove_node(3)
    r2 = exhaustive_reach(reduced, SC8, [2])[2]
    assert abs(r2.sum() - 0.205) < 1e-12


def test_disjoint_edges_cohesion():
    g = Graph.from_edges([(0, 1), (2, 3)], edge_weight=0.05)
    r = exhaustive_reach(g, SC8, [2])[2]
    assert abs(r.sum() - 0.2) < 1e-12
    assert r[0, 2] == 0.0  # disconnected pair stays 0 at every t
    assert r[0, 3] == 0.0


def test_intermediate_node_weights_single_route():
    g = Graph(
        np.array([1, 2, 3]),
        np.array([[0, 1], [1, 2]]),
        np.array([0.5, 0.5]),
        np.array([1.0, 0.25, 1.0]),
    )
    r = exhaustive_reach(g, SpreadParams(model="sc", l_max=4), [2])[2]
    assert abs(r[0, 2] - 0.5 * 0.25 * 0.5) < 1e-15  # endpoints pay nothing


def test_cc_walk_pays_node_weight_per_intermediate_visit():
    # Uniform triangle, w = nw = 0.5. Routes 0->1 up to length 4:
    #   L1 0-1 (P=.5), L2 0-2-1 (P=.125), L4 0-1-2-0-1 (P=.5^4 * .5^3),
    # no L3 route survives the no-backtrack rule. The L4 walk pays the
    # source's own weight at its intermediate visit.
    g = Graph(
        np.array([0, 1, 2]),
        np.array([[0, 1], [0, 2], [1, 2]]),
        np.full(3, 0.5),
        np.full(3, 0.5),
    )
    r = exhaustive_reach(g, SpreadParams(model="cc", l_max=4), [3, 4])
    assert abs(r[3][0, 1] - (1 - 0.5 * 0.875)) < 1e-15
    assert abs(r[4][0, 1] - (1 - 0.5 * 0.875 * (1 - 0.0078125))) < 1e-15
    assert abs(r[4][0, 1] - 0.56591796875) < 1e-15


# -- container and structure -------------------------------------------------


def test_matrix_container_matches_direct_reach(triangle):
    m = exhaustive_ism(triangle, CC6)
    direct = exhaustive_reach(triangle, CC6, range(1, 7))
    for t in range(1, 7):
        assert np.abs(m.evaluate(t) - direct[t]).max() < 1e-14


def test_diagonal_never_recorded(triangle):
    m = exhaustive_ism(triangle, CC6)
    assert np.all(m.evaluate(6).diagonal() == 0.0)
    # CC walks do pass through the source: off-diagonal survival must reflect
    # the through-source length-4 walk (checked analytically above).


def test_monotone_in_t(triangle):
    r = exhaustive_reach(triangle, CC6, range(1, 7))
    for t in range(2, 7):
        assert np.all(r[t] >= r[t - 1] - 1e-15)


def test_permutation_equivariance():
    g = random_graph(1234, n_max=7, p=0.5)
    perm = np.random.default_rng(0).permutation(g.n)
    # old node k becomes id perm[k]; with ids 0..n-1 the new position is perm[k]
    gp = Graph.from_edges(
        [(perm[a], perm[b]) for a, b in g.edges],
        node_ids=perm.tolist(),
        edge_weight=0.3,
    )
    p = SpreadParams(model="cc", l_max=5)
    r = exhaustive_reach(g, p, [5])[5]
    rp = exhaustive_reach(gp, p, [5])[5]
    # identical route-term multisets and exact fsum make this bitwise equal
    assert np.array_equal(rp[np.ix_(perm, perm)], r)


def test_oracle_size_guards():
    big = Graph.from_edges([(i, i + 1) for i in range(14)], edge_weight=0.5)
    with pytest.raises(ValueError, match="too large"):
        exhaustive_ism(big, SpreadParams(model="sc", l_max=4))
    with pytest.raises(ValueError, match="too large"):
        exhaustive_ism(Graph.from_edges([(0, 1)], edge_weight=0.5), SpreadParams(model="sc", l_max=11))


def test_report_flag():
    r = OracleReport(max_abs_diff=5e-13, n_pairs=6, tolerance=1e-12)
    assert r.passed
    assert not OracleReport(2e-12, 6, 1e-12).passed


# -- Monte Carlo diagnostic --------------------------------------------------


def test_mc_matches_ism_on_tree_within_3_sigma():
    tree = make_tree5(w=0.3)
    trials = 1_000_000
    truth = exhaustive_reach(tree, SpreadParams(model="sc", l_max=4), [4])[4]
    freq = percolation_mc(tree, 4, trials, seed=20260817)
    off = ~np.eye(tree.n, dtype=bool)
    sigma = np.sqrt(truth * (1.0 - truth) / trials)
    assert np.all(np.abs(freq - truth)[off] <= 3.0 * sigma[off] + 1e-12)


def test_mc_hop_limit_on_tree():
    tree = make_tree5(w=1.0)
    freq = percolation_mc(tree, 1, 100, seed=1)
    # w=1: within one hop only direct neighbors are reached
    assert freq[0, 1] == 1.0
    assert freq[0, 2] == 0.0


def test_mc_w1_connected_all_ones(triangle):
    g = Graph.from_edges([(a, b) for a, b in [(0, 1), (1, 2), (0, 2)]], edge_weight=1.0)
    freq = percolation_mc(g, 2, 50, seed=3)
    assert np.all(freq == 1.0)


def test_mc_fixed_seed_reproducible(tree5):
    a = percolation_mc(tree5, 3, 20_000, seed=99)
    b = percolation_mc(tree5, 3, 20_000, seed=99)
    assert np.array_equal(a, b)
    c = percolation_mc(tree5, 3, 20_000, seed=100)
    assert not np.array_equal(a, c)


def test_mc_node_weights_gate_intermediates():
    # middle node closed half the time: P(0 reaches 2) = w * nw * w
    g = Graph(
        np.array([0, 1, 2]),
        np.array([[0, 1], [1, 2]]),
        np.array([0.9, 0.9]),
        np.array([1.0, 0.5, 1.0]),
    )
    freq = percolation_mc(g, 2, 400_000, seed=11)
    expect = 0.9 * 0.5 * 0.9
    sigma = math.sqrt(expect * (1 - expect) / 400_000)
    assert abs(freq[0, 2] - expect) <= 3 * sigma
    # reaching the middle node itself never pays its weight
    sigma1 = math.sqrt(0.9 * 0.1 / 400_000)
    assert abs(freq[0, 1] - 0.9) <= 3 * sigma1
