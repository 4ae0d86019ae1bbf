"""Brute-force validators for the spreading engine, independent by construction.

`exhaustive_ism` re-derives the influence matrix on small instances by naive
recursion over every self-avoiding path or non-backtracking walk, with no
pruning, no shared adjacency caches and near-exact accumulation (math.fsum in
log space). `percolation_mc` is a Monte Carlo reachability diagnostic: it
samples edge and node states and counts hop-limited connectivity. The MC
numbers equal the matrix values only on trees, where each pair has a single
route; on graphs with shared edges the independent-route rule intentionally
differs from percolation, so elsewhere the gap is reported, never asserted.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace

import numba
import numpy as np

from .engine import InfluenceMatrix, SpreadParams, resolve_edge_weights
from .graphio import Graph

ORACLE_MAX_NODES = 12
ORACLE_MAX_LEN = 10
_EXPANSION_CAP = 50_000_000
_MC_CHUNK = 8192


@dataclass(frozen=True)
class OracleReport:
    """Outcome of an engine-vs-oracle comparison over a grid of times.

    worst names the (source id, target id, t) behind max_abs_diff, or None
    when the instance has a single node and nothing to compare."""

    max_abs_diff: float
    n_pairs: int
    tolerance: float
    worst: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.max_abs_diff <= self.tolerance


# -- exhaustive route enumeration -------------------------------------------


def _plain_adjacency(g: Graph):
    """Sorted (neighbor, edge row) lists built straight from the edge table,
    bypassing the graph's CSR cache so the oracle shares no traversal code."""
    adj = [[] for _ in range(g.n)]
    for e in range(g.m):
        a, b = int(g.edges[e, 0]), int(g.edges[e, 1])
        adj[a].append((b, e))
        adj[b].append((a, e))
    for lst in adj:
        lst.sort()
    return adj


def _collect_route_logs(g: Graph, p: SpreadParams):
    """Enumerate every retained route up to l_max with prune_eps forced to 0.

    Returns logs[src][tgt][L] = list of log1p(-P) per completed route, in
    canonical ascending-neighbor discovery order. Route probability multiplies
    edge weights and the node weight at each intermediate position; a walk
    revisiting a node pays its weight once per intermediate visit, and the
    endpoint positions never pay.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if g.n > ORACLE_MAX_NODES or p.l_max > ORACLE_MAX_LEN:
        raise ValueError(
            f"instance too large for the exhaustive oracle "
            f"(n <= {ORACLE_MAX_NODES}, l_max <= {ORACLE_MAX_LEN})"
        )
    ew = [float(x) for x in resolve_edge_weights(g, p)]
    nw = [float(x) for x in g.node_weight]
    adj = _plain_adjacency(g)
    sc = p.model == "sc"
    l_max = p.l_max
    budget = [0]
    logs = [[defaultdict(list) for _ in range(g.n)] for _ in range(g.n)]

    def rec(src, v, prev, length, prob, visited, sink):
        budget[0] += 1
        if budget[0] > _EXPANSION_CAP:
            raise RuntimeError("oracle enumeration exceeded its expansion cap")
        if length and v != src:
            sink[v][length].append(math.log1p(-prob))
        if length == l_max:
            return
        gate = nw[v] if length else 1.0
        for u, e in adj[v]:
            if sc:
                if visited[u]:
                    continue
            elif u == prev:
                continue
            q = prob * gate * ew[e]
            if sc:
                visited[u] = True
            rec(src, u, v, length + 1, q, visited, sink)
            if sc:
                visited[u] = False

    for src in range(g.n):
        visited = [False] * g.n
        visited[src] = True
        rec(src, src, -1, 0, 1.0, visited, logs[src])
    return logs


def exhaustive_ism(g: Graph, p: SpreadParams) -> InfluenceMatrix:
    """Influence matrix by naive recursion; survival factors combined with
    math.fsum per (pair, length), so results carry ~1 ulp accumulation error."""
    logs = _collect_route_logs(g, p)
    log_survival = np.zeros((p.l_max, g.n, g.n))
    for src in range(g.n):
        for tgt in range(g.n):
            for length, terms in logs[src][tgt].items():
                log_survival[length - 1, src, tgt] = math.fsum(terms)
    return InfluenceMatrix(g.ids, replace(p, prune_eps=0.0), log_survival)


def exhaustive_reach(g: Graph, p: SpreadParams, t_values) -> dict:
    """Dense reach matrices per time, evaluated straight from the raw route
    logs (one flat fsum per pair per time) so no engine evaluation code is
    on this route either. Returns {t: (n, n) array with zero diagonal}."""
    logs = _collect_route_logs(g, p)
    out = {}
    for t in t_values:
        t = int(t)
        if not 1 <= t <= p.l_max:
            raise ValueError(f"t={t} outside [1, {p.l_max}]")
        c = np.zeros((g.n, g.n))
        for src in range(g.n):
            for tgt in range(g.n):
                if tgt == src:
                    continue
                terms = []
                for length, chunk in logs[src][tgt].items():
                    if length <= t:
                        terms.extend(chunk)
                if terms:
                    c[src, tgt] = -math.expm1(math.fsum(terms))
        out[t] = c
    return out


def compare_with_engine(
    engine_matrix: InfluenceMatrix,
    g: Graph,
    p: SpreadParams,
    t_values=None,
    tolerance: float = 1e-12,
) -> OracleReport:
    """Max absolute off-diagonal difference between an engine result and the
    oracle over the given times (default: every integer up to l_max)."""
    ts = tuple(t_values) if t_values is not None else tuple(range(1, p.l_max + 1))
    truth = exhaustive_reach(g, p, ts)
    off = ~np.eye(g.n, dtype=bool)
    worst = 0.0
    where = None
    for t in ts:
        diff = np.abs(engine_matrix.evaluate(t) - truth[t])
        if g.n > 1:
            diff[~off] = 0.0
            i, j = np.unravel_index(int(diff.argmax()), diff.shape)
            if float(diff[i, j]) > worst or where is None:
                worst = float(diff[i, j])
                where = (int(g.ids[i]), int(g.ids[j]), int(t))
    return OracleReport(
        max_abs_diff=worst, n_pairs=g.n * (g.n - 1), tolerance=tolerance, worst=where
    )


# -- Monte Carlo percolation diagnostic --------------------------------------


@numba.njit(cache=True)
def _mc_chunk_counts(indptr, indices, slot_edge, open_edges, open_nodes, t, counts):
    # Hop-limited BFS per (trial, source). A closed node can be reached but
    # not expanded (intermediate positions pay node weights, endpoints do not).
    k = open_edges.shape[0]
    n = indptr.size - 1
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    for r in range(k):
        for src in range(n):
            for i in range(n):
                dist[i] = -1
            dist[src] = 0
            queue[0] = src
            head, tail = 0, 1
            while head < tail:
                v = queue[head]
                head += 1
                if dist[v] >= t:
                    continue
                if v != src and not open_nodes[r, v]:
                    continue
                for s in range(indptr[v], indptr[v + 1]):
                    u = indices[s]
                    if dist[u] < 0 and open_edges[r, slot_edge[s]]:
                        dist[u] = dist[v] + 1
                        counts[src, u] += 1
                        queue[tail] = u
                        tail += 1


def percolation_mc(g: Graph, t: int, trials: int, seed: int) -> np.ndarray:
    """Empirical hop-limited reach frequencies under independent edge/node
    openings: each edge is open with its weight, each node with its node
    weight (endpoints exempt). Entry (i, j) is the fraction of trials where
    an open path of at most t hops runs from i to j; the diagonal is 1.

    Trial r consumes a fixed block of the Philox(seed) stream (m edge draws
    then n node draws), so results depend only on (seed, r) and are identical
    whatever the internal batch size or trial count.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if t < 1:
        raise ValueError("t must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    w = np.asarray(g.edge_weight, dtype=np.float64)
    if np.any(np.isnan(w)):
        raise ValueError("graph has unset edge weights")
    nw = np.asarray(g.node_weight, dtype=np.float64)
    indptr, indices, slot_edge = g.csr()
    rng = np.random.Generator(np.random.Philox(seed))
    counts = np.zeros((g.n, g.n), dtype=np.int64)
    done = 0
    while done < trials:
        k = min(_MC_CHUNK, trials - done)
        u = rng.random((k, g.m + g.n))
        open_edges = u[:, : g.m] < w[None, :]
        open_nodes = u[:, g.m :] < nw[None, :]
        _mc_chunk_counts(indptr, indices, slot_edge, open_edges, open_nodes, int(t), counts)
        done += k
    freq = counts / float(trials)
    np.fill_diagonal(freq, 1.0)
    return freq
