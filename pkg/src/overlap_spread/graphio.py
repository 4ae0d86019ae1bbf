"""Dataset parsing, ego-network extraction, circle handling and summary statistics.

Node ids are arbitrary integers in the public API; internally every graph
stores a sorted id array and works in dense 0..n-1 positions. All graphs are
undirected and simple. Edge weights are transmission probabilities and may be
left unset (NaN) at parse time, to be filled by run parameters; node weights
are pass-through probabilities and default to 1.
"""

from __future__ import annotations

from array import array
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError


@dataclass
class Graph:
    """Undirected simple graph over integer node ids.

    ids          sorted original node ids, shape (n,)
    edges        positions into ids, shape (m, 2), u < v, lexicographically sorted
    edge_weight  per-edge probability in [0,1], NaN where unset
    node_weight  per-node pass-through probability in [0,1]
    """

    ids: np.ndarray
    edges: np.ndarray
    edge_weight: np.ndarray
    node_weight: np.ndarray
    _csr: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.edge_weight = np.asarray(self.edge_weight, dtype=np.float64)
        self.node_weight = np.asarray(self.node_weight, dtype=np.float64)
        n, m = self.ids.size, self.edges.shape[0]
        if self.ids.size and np.any(np.diff(self.ids) <= 0):
            raise ValueError("node ids must be strictly ascending")
        if self.edge_weight.shape != (m,) or self.node_weight.shape != (n,):
            raise ValueError("weight arrays do not match node/edge counts")
        if m:
            if self.edges.min() < 0 or self.edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(self.edges[:, 0] == self.edges[:, 1]):
                raise ValueError("self-loops are not allowed")
        w = self.edge_weight
        if np.any((w[~np.isnan(w)] < 0) | (w[~np.isnan(w)] > 1)):
            raise ValueError("edge weights must lie in [0,1]")
        if np.any((self.node_weight < 0) | (self.node_weight > 1)):
            raise ValueError("node weights must lie in [0,1]")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        pairs,
        node_ids=None,
        edge_weight: float | None = None,
        node_weight: float = 1.0,
    ) -> "Graph":
        """Build a graph from an iterable of (u, v) original-id pairs.

        Duplicate and reversed pairs collapse to one edge; self-loops are
        dropped. `node_ids` adds isolated nodes. `edge_weight` of None leaves
        weights unset (NaN) for run parameters to fill.
        """
        pairs = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
        pairs = pairs.reshape(-1, 2)
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        extra = np.asarray(sorted(node_ids), dtype=np.int64) if node_ids is not None else np.empty(0, np.int64)
        ids = np.unique(np.concatenate([pairs.ravel(), extra]))
        pos = np.searchsorted(ids, pairs)
        lo = np.minimum(pos[:, 0], pos[:, 1])
        hi = np.maximum(pos[:, 0], pos[:, 1])
        edges = np.unique(np.column_stack([lo, hi]), axis=0) if lo.size else np.empty((0, 2), np.int64)
        w = np.full(edges.shape[0], np.nan if edge_weight is None else float(edge_weight))
        nw = np.full(ids.size, float(node_weight))
        return cls(ids, edges, w, nw)

    # -- basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        return self.ids.size

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    def has_node(self, node_id: int) -> bool:
        i = np.searchsorted(self.ids, node_id)
        return i < self.n and self.ids[i] == node_id

    def position(self, node_id: int) -> int:
        i = int(np.searchsorted(self.ids, node_id))
        if i >= self.n or self.ids[i] != node_id:
            raise KeyError(f"node {node_id} not in graph")
        return i

    def csr(self):
        """Adjacency in CSR form: (indptr, indices, slot_edge) with neighbor
        positions ascending per row; slot_edge maps each adjacency slot back
        to its row in `edges` so undirected edge state stays consistent."""
        if self._csr is None:
            n, m = self.n, self.m
            u, v = self.edges[:, 0], self.edges[:, 1]
            deg = np.bincount(u, minlength=n) + np.bincount(v, minlength=n)
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            indices = np.empty(2 * m, dtype=np.int64)
            slot_edge = np.empty(2 * m, dtype=np.int64)
            cursor = indptr[:-1].copy()
            for a, b, e in zip(
                np.concatenate([u, v]), np.concatenate([v, u]), np.concatenate([np.arange(m), np.arange(m)])
            ):
                indices[cursor[a]] = b
                slot_edge[cursor[a]] = e
                cursor[a] += 1
            # ascending neighbor order inside each row
            for a in range(n):
                s, e = indptr[a], indptr[a + 1]
                order = np.argsort(indices[s:e], kind="stable")
                indices[s:e] = indices[s:e][order]
                slot_edge[s:e] = slot_edge[s:e][order]
            self._csr = (indptr, indices, slot_edge)
        return self._csr

    def degree(self) -> np.ndarray:
        indptr = self.csr()[0]
        return np.diff(indptr)

    def neighbors(self, node_id: int) -> np.ndarray:
        indptr, indices, _ = self.csr()
        p = self.position(node_id)
        return self.ids[indices[indptr[p] : indptr[p + 1]]]

    # -- surgery -----------------------------------------------------------

    def subgraph(self, keep_ids) -> "Graph":
        """Induced subgraph on the given original ids (must all exist)."""
        keep = np.unique(np.asarray(list(keep_ids), dtype=np.int64))
        pos = np.searchsorted(self.ids, keep)
        if np.any(pos >= self.n) or np.any(self.ids[np.minimum(pos, self.n - 1)] != keep):
            raise KeyError("subgraph node not in graph")
        mask = np.zeros(self.n, dtype=bool)
        mask[pos] = True
        emask = mask[self.edges[:, 0]] & mask[self.edges[:, 1]]
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[pos] = np.arange(keep.size)
        new_edges = remap[self.edges[emask]]
        return Graph(keep, new_edges, self.edge_weight[emask], self.node_weight[pos])

    def remove_node(self, node_id: int) -> "Graph":
        """Vertex-deleted graph: the node and its incident edges removed;
        all remaining nodes kept, including freshly isolated ones."""
        p = self.position(node_id)
        keep = np.delete(self.ids, p)
        return self.subgraph(keep)


# -- circles ---------------------------------------------------------------


@dataclass(frozen=True)
class CircleSet:
    """Named circles. Insertion order of `circles` is the file order and is
    preserved by every transformation, keeping downstream output stable."""

    circles: dict

    def counts(self) -> Counter:
        c = Counter()
        for members in self.circles.values():
            c.update(members)
        return c

    def membership_count(self, node_id: int) -> int:
        return sum(1 for members in self.circles.values() if node_id in members)

    def __len__(self) -> int:
        return len(self.circles)


@dataclass(frozen=True)
class NodePartition:
    """OL/NOL split of a graph's nodes (OL = member of two or more circles)."""

    ol: frozenset
    nol: frozenset

    @property
    def s(self) -> int:
        return len(self.ol)

    @property
    def t(self) -> int:
        return len(self.nol)

    def ol_mask(self, ids: np.ndarray) -> np.ndarray:
        """Boolean mask aligned with an id vector; True where the node is OL."""
        return np.fromiter((int(i) in self.ol for i in ids), dtype=bool, count=len(ids))


@dataclass(frozen=True)
class NetworkStats:
    n_nodes: int
    n_edges: int
    avg_degree: float
    avg_clustering: float
    overlap_pct: float


# -- parsing ---------------------------------------------------------------


def parse_edge_list(text: str, directed_symmetrize: bool = True) -> Graph:
    """Parse a whitespace-separated integer edge list into an undirected graph.

    Blank lines and `#` comments are ignored; duplicate and reversed lines
    collapse to one edge; self-loops are dropped. Directed inputs always
    symmetrize (the flag states the caller's intent; the undirected result is
    the same either way). Edge weights are left unset.
    """
    buf = array("q")
    for line_no, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(line_no, f"expected two ids, got {len(parts)} tokens")
        try:
            buf.append(int(parts[0]))
            buf.append(int(parts[1]))
        except ValueError:
            raise ParseError(line_no, f"non-integer id in {stripped!r}") from None
    pairs = np.frombuffer(buf, dtype=np.int64).reshape(-1, 2) if len(buf) else np.empty((0, 2), np.int64)
    return Graph.from_edges(pairs)


CIRCLE_FORMATS = ("ego-circles", "community-lines", "wiki-categories")


def parse_circles(text: str, fmt: str) -> CircleSet:
    """Parse one of the three circle file formats into a CircleSet.

    ego-circles:      name<TAB>id<TAB>id...
    community-lines:  one circle per line, whitespace-separated ids
    wiki-categories:  Category:name; id id ...
    Empty lines are ignored; empty circles are dropped; duplicate names get a
    deterministic `#k` suffix.
    """
    if fmt not in CIRCLE_FORMATS:
        raise ValueError(f"unknown circle format {fmt!r}; expected one of {CIRCLE_FORMATS}")
    circles: dict = {}
    seen: Counter = Counter()
    idx = 0
    for line_no, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        if fmt == "ego-circles":
            parts = stripped.split()
            name, tokens = parts[0], parts[1:]
        elif fmt == "community-lines":
            name, tokens = f"c{idx}", stripped.split()
        else:  # wiki-categories
            if not stripped.startswith("Category:") or ";" not in stripped:
                raise ParseError(line_no, "expected 'Category:name; id id ...'")
            head, _, tail = stripped.partition(";")
            name, tokens = head[len("Category:") :].strip(), tail.split()
        try:
            members = frozenset(int(t) for t in tokens)
        except ValueError:
            raise ParseError(line_no, "non-integer id in circle") from None
        idx += 1
        if not members:
            continue
        seen[name] += 1
        if seen[name] > 1:
            name = f"{name}#{seen[name]}"
        circles[name] = members
    return CircleSet(circles)


@dataclass(frozen=True)
class AttributeTable:
    """Rows of a TSV attribute table: node id -> attribute -> value or None."""

    columns: tuple
    rows: dict


def parse_attributes(text: str) -> AttributeTable:
    """Parse a TSV table with header `node<TAB>attr1<TAB>attr2...`;
    an empty cell means the attribute is missing for that node."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(1, "missing header row")
    header = lines[0].rstrip("\n").split("\t")
    if header[0] != "node" or len(header) < 2:
        raise ParseError(1, "header must be 'node<TAB>attr1...'")
    columns = tuple(header[1:])
    rows: dict = {}
    for line_no, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        cells = line.rstrip("\n").split("\t")
        try:
            node = int(cells[0])
        except ValueError:
            raise ParseError(line_no, f"non-integer node id {cells[0]!r}") from None
        values = {}
        for k, col in enumerate(columns, 1):
            cell = cells[k].strip() if k < len(cells) else ""
            values[col] = cell if cell else None
        rows[node] = values
    return AttributeTable(columns, rows)


def attribute_circles(attributes: AttributeTable, selected) -> CircleSet:
    """One circle per (attribute, distinct non-missing value); a node joins the
    circle of every selected attribute it has a value for, so a node missing
    any of two selected attributes ends up in at most one circle (NOL)."""
    selected = list(selected)
    if not selected:
        raise ValueError("selected attributes must be non-empty")
    for name in selected:
        if name not in attributes.columns:
            raise ValueError(f"unknown attribute {name!r}; table has {attributes.columns}")
    groups: dict = {}
    for node in sorted(attributes.rows):
        row = attributes.rows[node]
        for name in selected:
            value = row.get(name)
            if value is not None:
                groups.setdefault(f"{name}={value}", []).append(node)
    return CircleSet({k: frozenset(v) for k, v in groups.items()})


# -- ego pipeline ----------------------------------------------------------


def select_ego_candidates(g: Graph, min_deg: int, max_deg: int):
    """All nodes with min_deg <= degree <= max_deg, ascending by id."""
    if min_deg > max_deg:
        raise ValueError(f"min_deg {min_deg} exceeds max_deg {max_deg}")
    deg = g.degree()
    return [int(i) for i in g.ids[(deg >= min_deg) & (deg <= max_deg)]]


def extract_ego_network(g: Graph, ego: int) -> Graph:
    """Induced subgraph on the ego's neighbors with the ego deleted and any
    node isolated by that deletion dropped; disconnected components are kept."""
    friends = g.neighbors(ego)  # raises KeyError if ego absent
    sub = g.subgraph(friends)
    keep = sub.ids[sub.degree() > 0]
    return sub.subgraph(keep)


def restrict_circles(c: CircleSet, g: Graph) -> CircleSet:
    """Intersect every circle with the graph's nodes; drop emptied circles."""
    node_set = set(int(i) for i in g.ids)
    out = {}
    for name, members in c.circles.items():
        kept = members & node_set
        if kept:
            out[name] = frozenset(kept)
    return CircleSet(out)


def filter_min_circle_size(c: CircleSet, k: int) -> CircleSet:
    """Keep circles with at least k members."""
    if k < 1:
        raise ValueError("minimum circle size must be >= 1")
    return CircleSet({name: m for name, m in c.circles.items() if len(m) >= k})


def top_n_circles(c: CircleSet, n: int) -> CircleSet:
    """Keep the n largest circles (ties broken by name for determinism)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ranked = sorted(c.circles.items(), key=lambda kv: (-len(kv[1]), kv[0]))[:n]
    kept = set(name for name, _ in ranked)
    return CircleSet({name: m for name, m in c.circles.items() if name in kept})


def classify_ol_nol(c: CircleSet, g: Graph) -> NodePartition:
    """OL = nodes in two or more circles; NOL = every other node of g.
    Circles must already be restricted to g."""
    node_set = set(int(i) for i in g.ids)
    counts = c.counts()
    stray = set(counts) - node_set
    if stray:
        raise ValueError(f"circles reference nodes outside the graph, e.g. {sorted(stray)[:5]}")
    ol = frozenset(v for v, k in counts.items() if k >= 2)
    return NodePartition(ol, frozenset(node_set - ol))


# -- statistics ------------------------------------------------------------


def local_clustering(g: Graph) -> np.ndarray:
    """Local clustering coefficient per node; degree < 2 contributes 0."""
    n = g.n
    tri = np.zeros(n, dtype=np.int64)
    indptr, indices, _ = g.csr()
    adj = [indices[indptr[i] : indptr[i + 1]] for i in range(n)]
    for a, b in g.edges:
        common = np.intersect1d(adj[a], adj[b], assume_unique=True)
        if common.size:
            np.add.at(tri, common, 1)
    deg = g.degree().astype(np.float64)
    denom = deg * (deg - 1) / 2.0
    out = np.zeros(n)
    np.divide(tri, denom, out=out, where=denom > 0)
    return out


def network_stats(g: Graph, part: NodePartition) -> NetworkStats:
    """Summary row for one network: size, mean degree, mean local clustering,
    and the OL percentage of the partition."""
    if g.n == 0:
        raise ValueError("empty graph has no statistics")
    if part.s + part.t != g.n:
        raise ValueError("partition does not cover the graph")
    overlap = 100.0 * part.s / (part.s + part.t)
    return NetworkStats(
        n_nodes=g.n,
        n_edges=g.m,
        avg_degree=2.0 * g.m / g.n,
        avg_clustering=float(local_clustering(g).mean()),
        overlap_pct=overlap,
    )
