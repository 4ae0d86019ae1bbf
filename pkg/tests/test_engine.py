import numpy as np
import pytest

from overlap_spread import (
    BudgetExceededError,
    Graph,
    SpreadParams,
    compute_ism,
    load_matrix,
    save_matrix,
)
from overlap_spread.engine import (
    has_all_one_weight_cycle,
    matrix_fingerprint,
    resolve_edge_weights,
    route_probability_series,
)
from overlap_spread.oracle import compare_with_engine
from conftest import random_graph


def hetero_graph(seed):
    g = random_graph(seed, n_max=8, p=0.4)
    if g.m == 0:
        return None
    r = np.random.default_rng(seed + 77)
    return Graph(g.ids, g.edges, r.uniform(0.1, 0.9, g.m), r.uniform(0.5, 1.0, g.n))


# -- parameter validation -------------------------------------------------------


def test_params_validation():
    with pytest.raises(ValueError):
        SpreadParams(model="xx")
    with pytest.raises(ValueError):
        SpreadParams(l_max=0)
    with pytest.raises(ValueError):
        SpreadParams(prune_eps=1.0)
    with pytest.raises(ValueError):
        SpreadParams(t_grid=(3, 2))
    with pytest.raises(ValueError):
        SpreadParams(t_grid=(1, 101), l_max=100)
    p = SpreadParams(model="SC", t_grid=[1, 5, 10], l_max=10)
    assert p.model == "sc" and p.t_grid == (1, 5, 10)
    assert SpreadParams(l_max=3).times() == (1, 2, 3)


def test_resolve_weights(path3):
    w = resolve_edge_weights(path3, SpreadParams())
    assert (w == 0.05).all()
    w2 = resolve_edge_weights(path3, SpreadParams(uniform_edge_weight=0.3))
    assert (w2 == 0.3).all()
    from overlap_spread import parse_edge_list

    unset = parse_edge_list("1 2\n")
    with pytest.raises(ValueError, match="unset edge weights"):
        resolve_edge_weights(unset, SpreadParams())


def test_probability_series_matches_dfs_arithmetic():
    pl = route_probability_series(0.05, 1.0, 100, 1e-12)
    # 0.05^9 = 1.95e-12 survives, 0.05^10 falls below eps: all lengths >= 10 pruned
    assert pl.size == 9
    assert pl[0] == 0.05 and pl[1] == 0.05 * 1.0 * 0.05
    assert route_probability_series(0.05, 1.0, 3, 0.0).size == 3
    assert route_probability_series(0.0, 1.0, 5, 1e-12).size == 0


# -- anchors ---------------------------------------------------------------------


def test_path_values(path3):
    m = compute_ism(path3, SpreadParams(model="sc", l_max=8))
    assert m.evaluate(1)[0, 2] == 0.0
    assert abs(m.evaluate(2)[0, 2] - 0.0025) < 1e-12
    assert abs(m.evaluate(8)[0, 2] - 0.0025) < 1e-12
    assert np.all(m.evaluate(8).diagonal() == 0.0)


def test_triangle_values(triangle):
    m = compute_ism(triangle, SpreadParams(model="sc", l_max=8))
    assert abs(m.evaluate(2)[0, 1] - 0.052375) < 1e-12
    mc = compute_ism(triangle, SpreadParams(model="cc", l_max=6, prune_eps=0.0))
    assert abs(mc.evaluate(4)[0, 1] - 0.05238092265625) < 1e-15
    assert mc.evaluate(4)[0, 1] > m.evaluate(4)[0, 1]


def test_evaluate_range_errors(path3):
    m = compute_ism(path3, SpreadParams(model="sc", l_max=8))
    with pytest.raises(ValueError):
        m.evaluate(0)
    with pytest.raises(ValueError):
        m.evaluate(9)


# -- oracle equivalence -----------------------------------------------------------


@pytest.mark.parametrize("model", ["sc", "cc"])
def test_oracle_equivalence_uniform(model):
    worst = 0.0
    for seed in range(12):
        g = random_graph(3000 + seed)
        p = SpreadParams(model=model, l_max=8, prune_eps=0.0)
        rep = compare_with_engine(compute_ism(g, p), g, p)
        worst = max(worst, rep.max_abs_diff)
    assert worst <= 1e-12


@pytest.mark.parametrize("model", ["sc", "cc"])
def test_oracle_equivalence_heterogeneous(model):
    worst = 0.0
    checked = 0
    for seed in range(12):
        g = hetero_graph(4000 + seed)
        if g is None:
            continue
        checked += 1
        p = SpreadParams(model=model, l_max=6, prune_eps=0.0)
        rep = compare_with_engine(compute_ism(g, p), g, p)
        worst = max(worst, rep.max_abs_diff)
    assert checked >= 8 and worst <= 1e-12


def test_pruning_only_removes_small_routes(triangle):
    # prune_eps above w^2 kills the 2-step routes but keeps direct edges
    m = compute_ism(triangle, SpreadParams(model="sc", l_max=8, prune_eps=0.01))
    assert m.depth == 1
    assert abs(m.evaluate(8)[0, 1] - 0.05) < 1e-15


# -- invariants -------------------------------------------------------------------


def test_sc_symmetry_random():
    for seed in range(8):
        g = random_graph(5000 + seed)
        m = compute_ism(g, SpreadParams(model="sc", l_max=8))
        c = m.evaluate(8)
        assert np.abs(c - c.T).max() <= 1e-12


def test_monotone_in_t_and_weight():
    g = random_graph(6001, n_max=8, p=0.4)
    p1 = SpreadParams(model="sc", l_max=8, uniform_edge_weight=0.2)
    p2 = SpreadParams(model="sc", l_max=8, uniform_edge_weight=0.4)
    m1, m2 = compute_ism(g, p1), compute_ism(g, p2)
    prev = np.zeros((g.n, g.n))
    for t in range(1, 9):
        cur = m1.evaluate(t)
        assert np.all(cur >= prev - 1e-15)
        prev = cur
    assert np.all(m2.evaluate(8) >= m1.evaluate(8) - 1e-15)


def test_saturation_depth_bound():
    g = random_graph(7002, n_max=9, p=0.5)
    m = compute_ism(g, SpreadParams(model="sc", l_max=100, prune_eps=1e-12, uniform_edge_weight=0.05))
    assert m.depth <= 10
    assert np.array_equal(m.evaluate(50), m.evaluate(100))
    assert np.array_equal(m.evaluate(10), m.evaluate(100))


def test_worker_count_bit_identical():
    g = random_graph(8003, n_max=9, p=0.5)
    p = SpreadParams(model="sc", l_max=8)
    a = compute_ism(g, p, workers=1)
    b = compute_ism(g, p, workers=5)
    assert np.array_equal(a.log_survival, b.log_survival)
    gh = hetero_graph(8004)
    ph = SpreadParams(model="cc", l_max=6)
    ah = compute_ism(gh, ph, workers=1)
    bh = compute_ism(gh, ph, workers=5)
    assert np.array_equal(ah.log_survival, bh.log_survival)


# -- guards and errors --------------------------------------------------------------


def test_empty_graph_refused():
    g = Graph(np.empty(0, np.int64), np.empty((0, 2)), np.empty(0), np.empty(0))
    with pytest.raises(ValueError, match="empty graph"):
        compute_ism(g, SpreadParams())


def test_edgeless_graph_zero_matrix():
    g = Graph.from_edges([], node_ids=[1, 2, 3], edge_weight=0.5)
    m = compute_ism(g, SpreadParams(model="sc", l_max=4))
    assert m.depth == 0
    assert np.all(m.evaluate(4) == 0.0)


def test_cc_eps0_all_one_cycle_refused():
    tri = Graph.from_edges([(0, 1), (1, 2), (0, 2)], edge_weight=1.0)
    with pytest.raises(ValueError, match="cannot terminate"):
        compute_ism(tri, SpreadParams(model="cc", prune_eps=0.0, l_max=4))
    # sub-1 weights keep every lap shrinking, so eps=0 stays legal on cycles
    ok = Graph.from_edges([(0, 1), (1, 2), (0, 2)], edge_weight=0.05)
    m = compute_ism(ok, SpreadParams(model="cc", prune_eps=0.0, l_max=8))
    assert m.depth >= 1
    # and w=1 with a sub-1 node weight breaks the sure cycle too
    damped = Graph(np.arange(3), np.array([[0, 1], [0, 2], [1, 2]]), np.ones(3), np.full(3, 0.9))
    assert not has_all_one_weight_cycle(damped, np.ones(3))
    compute_ism(damped, SpreadParams(model="cc", prune_eps=0.0, l_max=6))


def test_route_budget_exceeded():
    k5 = Graph.from_edges([(i, j) for i in range(5) for j in range(i + 1, 5)], edge_weight=1.0)
    with pytest.raises(BudgetExceededError, match="source node 0"):
        compute_ism(k5, SpreadParams(model="sc", l_max=4, prune_eps=0.0, route_budget=10))
    # heterogeneous weights take the literal kernels; budget applies there too
    k5h = Graph(k5.ids, k5.edges, np.linspace(0.9, 1.0, k5.m), np.ones(5))
    with pytest.raises(BudgetExceededError):
        compute_ism(k5h, SpreadParams(model="cc", l_max=6, prune_eps=1e-9, route_budget=20))


# -- persistence ----------------------------------------------------------------------


def test_save_load_roundtrip_bitwise(tmp_path, triangle):
    m = compute_ism(triangle, SpreadParams(model="cc", l_max=6, prune_eps=0.0, t_grid=(1, 4, 6)))
    fp = tmp_path / "m.npz"
    save_matrix(m, fp)
    m2 = load_matrix(fp)
    assert np.array_equal(m.log_survival, m2.log_survival)
    assert np.array_equal(m.ids, m2.ids)
    assert m.params == m2.params
    assert matrix_fingerprint(m) == matrix_fingerprint(m2)
    for t in (1, 4, 6):
        assert np.array_equal(m.evaluate(t), m2.evaluate(t))
