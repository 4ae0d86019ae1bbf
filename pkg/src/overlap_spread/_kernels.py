"""Numba kernels for per-source route enumeration.

All kernels walk neighbors in ascending node order (the CSR rows are sorted),
so accumulation order is canonical and results do not depend on scheduling.
Each kernel covers one source and writes only that source's output slice,
making source-level threading safe. A negative return value reports a blown
expansion budget; raising stays in the Python wrappers.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def sap_counts_from_source(indptr, indices, src, depth_cap, budget, counts):
    """Count self-avoiding paths from src per (length, target) into
    counts[L-1, tgt]. Iterative DFS with an explicit stack. Returns expansions
    used, or -1 once the budget is exceeded."""
    n = indptr.size - 1
    visited = np.zeros(n, np.bool_)
    stack_node = np.empty(depth_cap + 1, np.int64)
    stack_ptr = np.empty(depth_cap + 1, np.int64)
    top = 0
    stack_node[0] = src
    stack_ptr[0] = indptr[src]
    visited[src] = True
    expansions = 0
    while top >= 0:
        v = stack_node[top]
        if top == depth_cap or stack_ptr[top] >= indptr[v + 1]:
            visited[v] = False
            top -= 1
            continue
        k = stack_ptr[top]
        stack_ptr[top] += 1
        u = indices[k]
        if visited[u]:
            continue
        expansions += 1
        if expansions > budget:
            return -1
        counts[top, u] += 1
        visited[u] = True
        top += 1
        stack_node[top] = u
        stack_ptr[top] = indptr[u]
    return expansions


@numba.njit(cache=True, nogil=True)
def sc_logs_from_source(
    indptr, indices, slot_edge, ew, nw, src, depth_cap, prune_eps, budget, slog
):
    """Literal self-avoiding enumeration with per-edge/per-node weights.
    Adds log1p(-P) per completed route into slog[L-1, tgt]; prefixes whose
    probability drops below prune_eps are cut (weights are <= 1, so no
    extension can recover). Returns expansions or -1 on budget overflow."""
    n = indptr.size - 1
    visited = np.zeros(n, np.bool_)
    stack_node = np.empty(depth_cap + 1, np.int64)
    stack_ptr = np.empty(depth_cap + 1, np.int64)
    prob = np.empty(depth_cap + 1, np.float64)
    top = 0
    stack_node[0] = src
    stack_ptr[0] = indptr[src]
    prob[0] = 1.0
    visited[src] = True
    expansions = 0
    while top >= 0:
        v = stack_node[top]
        if top == depth_cap or stack_ptr[top] >= indptr[v + 1]:
            visited[v] = False
            top -= 1
            continue
        k = stack_ptr[top]
        stack_ptr[top] += 1
        u = indices[k]
        if visited[u]:
            continue
        gate = nw[v] if top > 0 else 1.0
        q = prob[top] * gate * ew[slot_edge[k]]
        if prune_eps > 0.0 and q < prune_eps:
            continue
        expansions += 1
        if expansions > budget:
            return -1
        slog[top, u] += np.log1p(-q)
        visited[u] = True
        top += 1
        stack_node[top] = u
        stack_ptr[top] = indptr[u]
        prob[top] = q
    return expansions


@numba.njit(cache=True, nogil=True)
def cc_logs_from_source(
    indptr, indices, slot_edge, ew, nw, src, depth_cap, prune_eps, budget, slog
):
    """Literal non-backtracking enumeration with per-edge/per-node weights.
    Nodes and edges may repeat; stepping straight back along the arriving
    edge is forbidden. Routes ending at the source are walked through but
    never recorded. Returns expansions or -1 on budget overflow."""
    stack_node = np.empty(depth_cap + 1, np.int64)
    stack_ptr = np.empty(depth_cap + 1, np.int64)
    prob = np.empty(depth_cap + 1, np.float64)
    top = 0
    stack_node[0] = src
    stack_ptr[0] = indptr[src]
    prob[0] = 1.0
    expansions = 0
    while top >= 0:
        v = stack_node[top]
        if top == depth_cap or stack_ptr[top] >= indptr[v + 1]:
            top -= 1
            continue
        k = stack_ptr[top]
        stack_ptr[top] += 1
        u = indices[k]
        if top > 0 and u == stack_node[top - 1]:
            continue
        gate = nw[v] if top > 0 else 1.0
        q = prob[top] * gate * ew[slot_edge[k]]
        if prune_eps > 0.0 and q < prune_eps:
            continue
        expansions += 1
        if expansions > budget:
            return -1
        if u != src:
            slog[top, u] += np.log1p(-q)
        top += 1
        stack_node[top] = u
        stack_ptr[top] = indptr[u]
        prob[top] = q
    return expansions
