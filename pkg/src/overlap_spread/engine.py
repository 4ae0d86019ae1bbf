"""Influence spreading matrices for simple and complex contagion.

The matrix C(i,j)(T) is the probability that influence from node i reaches
node j within T steps under an independent-route combination rule: every
retained route of length L from i to j contributes a survival factor
(1 - P(route)), survival factors multiply, and C = 1 - (product of factors
over lengths <= T). Route probability is the product of edge weights along
the route times the node weights at intermediate positions (endpoints
excluded; a node revisited mid-walk counts once per intermediate visit).

Simple contagion (SC) retains self-avoiding paths only. Complex contagion
(CC) retains non-backtracking walks: nodes and edges may repeat, but a step
v->u immediately followed by u->v is forbidden, so the shortest reinforcing
loop is a triangle.

Storage is per-length log survival, so one enumeration serves every T.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import BudgetExceededError
from .graphio import Graph

DEFAULT_L_MAX = 100
DEFAULT_PRUNE_EPS = 1e-12
DEFAULT_ROUTE_BUDGET = 10**8
MATRIX_DUMP_VERSION = 1


@dataclass(frozen=True)
class SpreadParams:
    """Run parameters for one influence-spreading computation.

    model                "sc" (self-avoiding paths) or "cc" (non-backtracking walks)
    uniform_edge_weight  if set, overrides every per-edge weight
    l_max                hard route-length cap
    prune_eps            route prefixes with probability < prune_eps are cut
    t_grid               ascending evaluation times; None means 1..l_max
    route_budget         per-source expansion cap, guards w=1 blowups
    """

    model: str = "sc"
    uniform_edge_weight: float | None = None
    l_max: int = DEFAULT_L_MAX
    prune_eps: float = DEFAULT_PRUNE_EPS
    t_grid: tuple | None = None
    route_budget: int = DEFAULT_ROUTE_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "model", str(self.model).lower())
        if self.model not in ("sc", "cc"):
            raise ValueError(f"model must be 'sc' or 'cc', got {self.model!r}")
        if self.uniform_edge_weight is not None and not 0.0 <= self.uniform_edge_weight <= 1.0:
            raise ValueError("uniform_edge_weight must lie in [0,1]")
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")
        if not 0.0 <= self.prune_eps < 1.0:
            raise ValueError("prune_eps must lie in [0,1)")
        if self.route_budget < 1:
            raise ValueError("route_budget must be >= 1")
        if self.t_grid is not None:
            grid = tuple(int(t) for t in self.t_grid)
            if not grid:
                raise ValueError("t_grid must be non-empty when given")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("t_grid must be strictly ascending")
            if grid[0] < 1 or grid[-1] > self.l_max:
                raise ValueError("t_grid values must lie in [1, l_max]")
            object.__setattr__(self, "t_grid", grid)

    def times(self) -> tuple:
        return self.t_grid if self.t_grid is not None else tuple(range(1, self.l_max + 1))


def resolve_edge_weights(g: Graph, p: SpreadParams) -> np.ndarray:
    """Effective per-edge weights: the uniform override, or the graph's own
    weights, which must then be fully set (no NaN)."""
    if p.uniform_edge_weight is not None:
        return np.full(g.m, float(p.uniform_edge_weight))
    w = np.asarray(g.edge_weight, dtype=np.float64)
    if np.any(np.isnan(w)):
        raise ValueError("graph has unset edge weights and no uniform override was given")
    return w.copy()


def route_probability_series(w: float, nw: float, l_max: int, prune_eps: float) -> np.ndarray:
    """Uniform-weight route probabilities p_L for L = 1..L_eff, computed by the
    same left-to-right multiplication the enumerators use (p_1 = w, then
    p_{k+1} = p_k * nw * w), truncated at the first L with p_L < prune_eps."""
    out = []
    p = float(w)
    for _ in range(l_max):
        if prune_eps > 0.0 and p < prune_eps:
            break
        out.append(p)
        p = p * nw * w
    return np.asarray(out, dtype=np.float64)


def has_all_one_weight_cycle(g: Graph, w: np.ndarray) -> bool:
    """True when some cycle keeps probability 1 forever: every edge on it has
    weight 1 and every node on it has weight 1. Union-find over the sure edges."""
    sure = (w == 1.0) & (g.node_weight[g.edges[:, 0]] == 1.0) & (g.node_weight[g.edges[:, 1]] == 1.0)
    parent = np.arange(g.n)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.edges[sure]:
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        parent[ra] = rb
    return False


@dataclass
class InfluenceMatrix:
    """Per-length log survival factors plus evaluation cache.

    log_survival[L-1, i, j] = log F_L(i, j) <= 0, one layer per stored length;
    lengths past the stored depth have factor 1 (nothing retained there).
    evaluate(t) yields the dense reach-probability matrix with a zero diagonal.
    """

    ids: np.ndarray
    params: SpreadParams
    log_survival: np.ndarray
    _cum: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.log_survival = np.asarray(self.log_survival, dtype=np.float64)
        n = self.ids.size
        if self.log_survival.ndim != 3 or self.log_survival.shape[1:] != (n, n):
            raise ValueError("log_survival must have shape (depth, n, n)")

    @property
    def n(self) -> int:
        return self.ids.size

    @property
    def depth(self) -> int:
        return self.log_survival.shape[0]

    def evaluate(self, t: int) -> np.ndarray:
        if not 1 <= t <= self.params.l_max:
            raise ValueError(f"t={t} outside [1, {self.params.l_max}]")
        tt = min(int(t), self.depth)
        if tt == 0:
            return np.zeros((self.n, self.n))
        if self._cum is None:
            self._cum = np.cumsum(self.log_survival, axis=0)
        c = -np.expm1(self._cum[tt - 1])
        np.fill_diagonal(c, 0.0)
        return c

    def evaluate_many(self, ts) -> dict:
        return {int(t): self.evaluate(t) for t in ts}


def cohesion_value(m: InfluenceMatrix, t: int) -> float:
    """Sum of all off-diagonal entries of evaluate(t)."""
    return float(m.evaluate(t).sum())


def remove_node(g: Graph, v: int) -> Graph:
    """Vertex-deleted subgraph; see Graph.remove_node."""
    return g.remove_node(v)


# -- computation --------------------------------------------------------------


def _run_sources(work, n: int, workers: int) -> None:
    # more threads than cores is allowed (kernels drop the GIL); disjoint
    # output slices keep any schedule bit-identical
    workers = max(1, min(int(workers), n))
    if workers == 1:
        for src in range(n):
            work(src)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for f in [pool.submit(work, src) for src in range(n)]:
            f.result()


def _trim_depth(slog: np.ndarray) -> np.ndarray:
    depth = slog.shape[0]
    while depth > 0 and not np.any(slog[depth - 1]):
        depth -= 1
    return np.ascontiguousarray(slog[:depth])


def _sc_uniform(g: Graph, pl: np.ndarray, budget: int, workers: int) -> np.ndarray:
    """Uniform weights make every length-L route worth p_L, so per-pair factors
    collapse to counts of self-avoiding paths: log F_L = N_L * log1p(-p_L).
    The count DFS walks exactly the retained route set of the literal rule."""
    from ._kernels import sap_counts_from_source

    indptr, indices, _ = g.csr()
    n, depth = g.n, pl.size
    with np.errstate(divide="ignore"):
        terms = np.log1p(-pl)
    slog = np.zeros((depth, n, n))

    def work(src):
        counts = np.zeros((depth, n), np.int64)
        used = sap_counts_from_source(indptr, indices, src, depth, budget, counts)
        if used < 0:
            raise BudgetExceededError(
                f"route budget exceeded at source node {int(g.ids[src])} (> {budget} expansions)"
            )
        with np.errstate(invalid="ignore"):
            slog[:, src, :] = np.where(counts > 0, counts * terms[:, None], 0.0)

    _run_sources(work, n, workers)
    return slog


def _cc_uniform(g: Graph, pl: np.ndarray) -> np.ndarray:
    """Non-backtracking walk counts by the standard recurrence
    N_1 = A, N_2 = A^2 - D, N_{k+1} = N_k A - N_{k-1}(D - I); exact in float64
    below 2^53 walks, and already saturated when counts run higher. Polynomial
    time, so the enumeration budget has nothing to guard here."""
    n = g.n
    a = np.zeros((n, n))
    a[g.edges[:, 0], g.edges[:, 1]] = 1.0
    a[g.edges[:, 1], g.edges[:, 0]] = 1.0
    deg = a.sum(axis=1)
    depth = pl.size
    with np.errstate(divide="ignore"):
        terms = np.log1p(-pl)
    slog = np.empty((depth, n, n))
    n_prev: np.ndarray | None = None
    n_cur = a.copy()
    for k in range(1, depth + 1):
        with np.errstate(invalid="ignore"):
            slog[k - 1] = np.where(n_cur > 0, n_cur * terms[k - 1], 0.0)
        if k == depth:
            break
        if n_prev is None:
            n_next = a @ a - np.diag(deg)
        else:
            n_next = n_cur @ a - n_prev * (deg - 1.0)[None, :]
        # counts are nonnegative; NaN can only arise from inf - inf once the
        # count overflows float range, where "astronomically many" is the truth
        n_next = np.where(np.isnan(n_next), np.inf, n_next)
        np.maximum(n_next, 0.0, out=n_next)
        n_prev, n_cur = n_cur, n_next
    return slog


def _general_enumeration(
    g: Graph, p: SpreadParams, ew: np.ndarray, nw: np.ndarray, workers: int
) -> np.ndarray:
    from ._kernels import cc_logs_from_source, sc_logs_from_source

    indptr, indices, slot_edge = g.csr()
    n = g.n
    kern = sc_logs_from_source if p.model == "sc" else cc_logs_from_source
    slog = np.zeros((p.l_max, n, n))

    def work(src):
        buf = np.zeros((p.l_max, n))
        used = kern(
            indptr, indices, slot_edge, ew, nw, src, p.l_max, p.prune_eps, p.route_budget, buf
        )
        if used < 0:
            raise BudgetExceededError(
                f"route budget exceeded at source node {int(g.ids[src])} "
                f"(> {p.route_budget} expansions)"
            )
        slog[:, src, :] = buf

    _run_sources(work, n, workers)
    return slog


def compute_ism(g: Graph, p: SpreadParams, workers: int = 1) -> InfluenceMatrix:
    """Influence matrix for the graph under the given parameters.

    Uniform weights take counting shortcuts that provably enumerate the same
    retained route set; mixed weights run the literal pruned depth-first
    enumeration. Either way the survival factors follow the one contract:
    F_L(i,j) = product of (1 - P) over retained routes of length L.

    Worker threads split source nodes; each writes a disjoint output slice in
    canonical order, so results are bit-identical for any worker count.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    ew = resolve_edge_weights(g, p)
    nw = np.asarray(g.node_weight, dtype=np.float64)
    if p.model == "cc" and p.prune_eps == 0.0 and has_all_one_weight_cycle(g, ew):
        raise ValueError(
            "complex contagion with prune_eps=0 cannot terminate: the graph "
            "has a cycle whose edge and node weights are all 1"
        )
    if g.m == 0:
        return InfluenceMatrix(g.ids, p, np.zeros((0, g.n, g.n)))
    if np.all(ew == ew[0]) and np.all(nw == nw[0]):
        pl = route_probability_series(float(ew[0]), float(nw[0]), p.l_max, p.prune_eps)
        if pl.size == 0:
            return InfluenceMatrix(g.ids, p, np.zeros((0, g.n, g.n)))
        if p.model == "sc":
            slog = _sc_uniform(g, pl, p.route_budget, workers)
        else:
            slog = _cc_uniform(g, pl)
    else:
        slog = _general_enumeration(g, p, ew, nw, workers)
    return InfluenceMatrix(g.ids, p, _trim_depth(slog))


# -- dump / reload -----------------------------------------------------------


def save_matrix(m: InfluenceMatrix, path) -> None:
    """Exact binary dump: sparse (length, source, target, log factor) records
    with a version tag and the parameters as JSON. Float64 roundtrips bit-for-bit."""
    ell, src, tgt = np.nonzero(m.log_survival)
    payload = {
        "version": np.int64(MATRIX_DUMP_VERSION),
        "n": np.int64(m.n),
        "depth": np.int64(m.depth),
        "ids": m.ids,
        "rec_len": ell.astype(np.int64),
        "rec_src": src.astype(np.int64),
        "rec_tgt": tgt.astype(np.int64),
        "rec_log": m.log_survival[ell, src, tgt],
        "params_json": np.frombuffer(json.dumps(asdict(m.params)).encode(), dtype=np.uint8),
    }
    with open(path, "wb") as fh:
        np.savez_compressed(fh, **payload)


def load_matrix(path) -> InfluenceMatrix:
    with np.load(path) as z:
        if int(z["version"]) != MATRIX_DUMP_VERSION:
            raise ValueError(f"unsupported matrix dump version {int(z['version'])}")
        n, depth = int(z["n"]), int(z["depth"])
        raw = json.loads(bytes(z["params_json"]).decode())
        raw["t_grid"] = tuple(raw["t_grid"]) if raw["t_grid"] is not None else None
        params = SpreadParams(**raw)
        log_survival = np.zeros((depth, n, n))
        log_survival[z["rec_len"], z["rec_src"], z["rec_tgt"]] = z["rec_log"]
        return InfluenceMatrix(z["ids"], params, log_survival)


def matrix_fingerprint(m: InfluenceMatrix) -> str:
    """Stable hex digest of the exact stored floats, for cache naming."""
    import hashlib

    h = hashlib.sha256()
    h.update(np.int64(m.n).tobytes())
    h.update(m.ids.tobytes())
    h.update(m.log_survival.tobytes())
    return h.hexdigest()[:16]
