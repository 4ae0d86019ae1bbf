"""Node metrics and group statistics over influence matrices.

Centralities are plain row/column sums of a reach matrix. Betweenness here is
the relative cohesion drop when a vertex is deleted and the matrix recomputed,
not shortest-path betweenness. Group comparisons relate OL nodes (members of
two or more circles) to NOL nodes via relative mean differences, geometric
mean ratios with a bootstrap, Lorenz concentration curves and top-percentile
class shares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import InfluenceMatrix, SpreadParams, compute_ism
from .graphio import CircleSet, Graph, NodePartition, classify_ol_nol, filter_min_circle_size, restrict_circles

SATURATION_T_CENTRALITY = 50
SATURATION_T_BETWEENNESS = 30


# -- result containers -------------------------------------------------------


@dataclass(frozen=True)
class CentralityTable:
    """Per-node metric values for one network at one time."""

    network_id: str
    t: int
    ids: np.ndarray
    in_c: np.ndarray
    out_c: np.ndarray
    is_ol: np.ndarray
    betweenness: np.ndarray | None = None


@dataclass(frozen=True)
class ComparisonResult:
    """Aggregate OL-vs-NOL relative differences across networks per time.

    per_network rows align with t_values; NaN marks a time where the
    difference is undefined (empty class or zero NOL mean)."""

    metric: str
    t_values: tuple
    network_ids: tuple
    per_network: np.ndarray
    mean: np.ndarray
    sem: np.ndarray
    n_networks: int


@dataclass(frozen=True)
class GMRatio:
    r: float
    excluded_zeros: int


@dataclass(frozen=True)
class GMRatioResult:
    r: float
    ci_low: float
    ci_high: float
    n_resamples: int
    seed: int
    excluded_zeros: int
    samples: np.ndarray


@dataclass(frozen=True)
class LorenzResult:
    curve: np.ndarray
    bulk_share: float
    top10_share: float
    top1_share: float

    def value_share_below(self, pop_fraction: float) -> float:
        return float(np.interp(pop_fraction, self.curve[:, 0], self.curve[:, 1]))


@dataclass(frozen=True)
class PercentileShares:
    ol_pct_total: float
    ol_pct_top10: float
    ol_pct_top1: float
    n_total: int
    n_top10: int
    n_top1: int
    top10_value_share: float
    top1_value_share: float
    rank_decay: float | None = None


@dataclass(frozen=True)
class SweepRow:
    k: int
    pct_delta_in: float
    pct_delta_out: float
    overlap_pct: float
    flagged: bool
    reason: str = ""


# -- centralities and cohesion ------------------------------------------------


def in_centrality(c: np.ndarray) -> np.ndarray:
    """Column sums: how much influence arrives at each node."""
    return np.asarray(c, dtype=np.float64).sum(axis=0)


def out_centrality(c: np.ndarray) -> np.ndarray:
    """Row sums: how much influence each node sends out."""
    return np.asarray(c, dtype=np.float64).sum(axis=1)


def cohesion(c: np.ndarray) -> float:
    """Total influence: sum of all off-diagonal entries (diagonal is 0)."""
    return float(np.asarray(c, dtype=np.float64).sum())


def cohesion_series(m: InfluenceMatrix, t_values) -> np.ndarray:
    return np.array([cohesion(m.evaluate(t)) for t in t_values])


def betweenness_all(
    g: Graph, p: SpreadParams, t: int, workers: int = 1, base: InfluenceMatrix | None = None
) -> np.ndarray:
    """Relative cohesion drop per deleted vertex, aligned with g.ids.

    Each node is removed in turn and the whole matrix recomputed on the
    reduced graph. Values are clamped at 0 against rounding; removal can
    never truly raise cohesion because it only deletes routes.
    """
    m = base if base is not None else compute_ism(g, p, workers)
    full = cohesion(m.evaluate(t))
    if full <= 0.0:
        raise ValueError("full-network cohesion is zero; betweenness is undefined")
    out = np.empty(g.n)
    for k, node in enumerate(g.ids):
        reduced = g.remove_node(int(node))
        c_k = cohesion(compute_ism(reduced, p, workers).evaluate(t)) if reduced.n else 0.0
        out[k] = max(0.0, (full - c_k) / full)
    return out


def betweenness_subset(
    g: Graph, p: SpreadParams, t: int, nodes, workers: int = 1, base: InfluenceMatrix | None = None
) -> dict:
    """Betweenness for selected original ids only (sampling hook for large runs)."""
    m = base if base is not None else compute_ism(g, p, workers)
    full = cohesion(m.evaluate(t))
    if full <= 0.0:
        raise ValueError("full-network cohesion is zero; betweenness is undefined")
    out = {}
    for node in nodes:
        reduced = g.remove_node(int(node))
        c_k = cohesion(compute_ism(reduced, p, workers).evaluate(t)) if reduced.n else 0.0
        out[int(node)] = max(0.0, (full - c_k) / full)
    return out


def centrality_table(
    network_id: str,
    m: InfluenceMatrix,
    t: int,
    part: NodePartition,
    betweenness: np.ndarray | None = None,
) -> CentralityTable:
    c = m.evaluate(t)
    return CentralityTable(
        network_id=network_id,
        t=int(t),
        ids=m.ids.copy(),
        in_c=in_centrality(c),
        out_c=out_centrality(c),
        is_ol=part.ol_mask(m.ids),
        betweenness=None if betweenness is None else np.asarray(betweenness, dtype=np.float64),
    )


# -- group comparisons ---------------------------------------------------------


def group_relative_difference(values: np.ndarray, is_ol: np.ndarray) -> float:
    """Percent difference of class means: 100*(mean_OL - mean_NOL)/mean_NOL."""
    values = np.asarray(values, dtype=np.float64)
    is_ol = np.asarray(is_ol, dtype=bool)
    if not is_ol.any():
        raise ValueError("OL class is empty")
    if is_ol.all():
        raise ValueError("NOL class is empty")
    mean_ol = float(values[is_ol].mean())
    mean_nol = float(values[~is_ol].mean())
    if mean_nol == 0.0:
        raise ValueError("NOL mean is zero; relative difference is undefined")
    return 100.0 * (mean_ol - mean_nol) / mean_nol


def aggregate_networks(metric: str, t_values, per_network: dict) -> ComparisonResult:
    """Mean and standard error of per-network percent differences per time.

    per_network maps network id -> array aligned with t_values, NaN where a
    network's difference is undefined at that time. The mean skips NaNs; the
    SEM (sample std over sqrt(count)) needs two values and is NaN otherwise.
    """
    t_values = tuple(int(t) for t in t_values)
    ids = tuple(per_network)
    if not ids:
        raise ValueError("no networks to aggregate")
    rows = np.full((len(ids), len(t_values)), np.nan)
    for r, nid in enumerate(ids):
        series = np.asarray(per_network[nid], dtype=np.float64)
        if series.shape != (len(t_values),):
            raise ValueError(f"network {nid!r} series does not match the T grid")
        rows[r] = series
    counts = np.sum(~np.isnan(rows), axis=0)
    mean = np.where(counts > 0, np.nansum(rows, axis=0) / np.maximum(counts, 1), np.nan)
    sem = np.full(len(t_values), np.nan)
    for j in range(len(t_values)):
        col = rows[:, j]
        col = col[~np.isnan(col)]
        if col.size >= 2:
            sem[j] = float(col.std(ddof=1) / math.sqrt(col.size))
    return ComparisonResult(
        metric=metric,
        t_values=t_values,
        network_ids=ids,
        per_network=rows,
        mean=mean,
        sem=sem,
        n_networks=len(ids),
    )


def gm_ratio(values: np.ndarray, is_ol: np.ndarray) -> GMRatio:
    """Ratio of class geometric means, zeros excluded and counted."""
    values = np.asarray(values, dtype=np.float64)
    is_ol = np.asarray(is_ol, dtype=bool)
    if np.any(values < 0):
        raise ValueError("geometric means need nonnegative values")
    ol = values[is_ol]
    nol = values[~is_ol]
    excluded = int((ol == 0).sum() + (nol == 0).sum())
    ol = ol[ol > 0]
    nol = nol[nol > 0]
    if ol.size == 0 or nol.size == 0:
        raise ValueError("a class is empty after zero-exclusion; GM ratio is undefined")
    r = math.exp(float(np.log(ol).mean()) - float(np.log(nol).mean()))
    return GMRatio(r=r, excluded_zeros=excluded)


def _nearest_rank(sorted_vals: np.ndarray, pct: float) -> float:
    k = max(1, math.ceil(pct / 100.0 * sorted_vals.size))
    return float(sorted_vals[k - 1])


def bootstrap_gm_ratio(
    values: np.ndarray, is_ol: np.ndarray, n_resamples: int, seed: int
) -> GMRatioResult:
    """Independent with-replacement resampling of each class at its own size.

    All OL index rows are drawn before all NOL rows from one Philox(seed)
    stream, so results depend only on (values, partition, n_resamples, seed).
    Per-resample ratios follow the same zero-exclusion rule; the rare resample
    whose class dies entirely is dropped from the quantiles. Bounds are the
    1% and 99% nearest-rank quantiles of the resampled ratios.
    """
    if n_resamples < 1:
        raise ValueError("n_resamples must be >= 1")
    point = gm_ratio(values, is_ol)
    values = np.asarray(values, dtype=np.float64)
    is_ol = np.asarray(is_ol, dtype=bool)
    ol = values[is_ol]
    nol = values[~is_ol]
    rng = np.random.Generator(np.random.Philox(seed))
    idx_ol = rng.integers(0, ol.size, size=(n_resamples, ol.size))
    idx_nol = rng.integers(0, nol.size, size=(n_resamples, nol.size))

    def mean_log(cls: np.ndarray, idx: np.ndarray) -> np.ndarray:
        drawn = cls[idx]
        pos = drawn > 0
        cnt = pos.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(pos, np.log(np.where(pos, drawn, 1.0)), 0.0).sum(axis=1)
            return np.where(cnt > 0, s / cnt, np.nan)

    ratios = np.exp(mean_log(ol, idx_ol) - mean_log(nol, idx_nol))
    valid = np.sort(ratios[~np.isnan(ratios)])
    if valid.size == 0:
        raise ValueError("every resample lost a class to zero-exclusion")
    return GMRatioResult(
        r=point.r,
        ci_low=_nearest_rank(valid, 1.0),
        ci_high=_nearest_rank(valid, 99.0),
        n_resamples=n_resamples,
        seed=int(seed),
        excluded_zeros=point.excluded_zeros,
        samples=ratios,
    )


# -- concentration --------------------------------------------------------------


def lorenz(values: np.ndarray, p_lo: float = 10.0, p_hi: float = 90.0) -> LorenzResult:
    """Cumulative value share against cumulative population share (ascending).

    The curve is piecewise linear through (i/n, cum_i/total). Band shares are
    curve differences, so the bottom, bulk and top bands sum to 1 exactly and
    a constant vector yields bulk (p_hi - p_lo)/100 on the nose.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty input")
    if np.any(values < 0):
        raise ValueError("values must be nonnegative")
    total = float(values.sum())
    if total == 0.0:
        raise ValueError("all-zero input has no concentration curve")
    if not 0.0 <= p_lo < p_hi <= 100.0:
        raise ValueError("need 0 <= p_lo < p_hi <= 100")
    srt = np.sort(values)
    n = srt.size
    xs = np.arange(n + 1) / n
    ys = np.concatenate([[0.0], np.cumsum(srt) / total])
    ys[-1] = 1.0
    curve = np.column_stack([xs, ys])

    def at(p):
        return float(np.interp(p, xs, ys))

    return LorenzResult(
        curve=curve,
        bulk_share=at(p_hi / 100.0) - at(p_lo / 100.0),
        top10_share=1.0 - at(0.90),
        top1_share=1.0 - at(0.99),
    )


def percentile_class_shares(
    values: np.ndarray, is_ol: np.ndarray, rank_decay: float | None = None
) -> PercentileShares:
    """OL percentage overall and inside the top-10% / top-1% value bands.

    Band sizes use the nearest-rank rule: the top-k% band holds
    n - ceil((100-k)/100 * n) nodes, ties broken by ascending position for
    determinism. With rank_decay set, band members are weighted by
    exp(-rank_decay * rank) (rank 0 = largest value) instead of counted;
    weighted figures are approximations and not comparable to plain counts.
    """
    values = np.asarray(values, dtype=np.float64)
    is_ol = np.asarray(is_ol, dtype=bool)
    n = values.size
    if n == 0:
        raise ValueError("empty input")
    total = float(values.sum())
    if total <= 0.0:
        raise ValueError("all-zero input has no top-percentile bands")
    order = np.argsort(values, kind="stable")  # ascending; ties keep id order

    def band(top_pct: float):
        size = n - math.ceil((100.0 - top_pct) / 100.0 * n)
        members = order[n - size :] if size else order[:0]
        return size, members

    def ol_share(members: np.ndarray) -> float:
        if members.size == 0:
            return float("nan")
        if rank_decay is None:
            return 100.0 * float(is_ol[members].sum()) / members.size
        ranks = np.arange(members.size)[::-1]  # largest value gets rank 0
        w = np.exp(-rank_decay * ranks)
        return 100.0 * float(w[is_ol[members]].sum()) / float(w.sum())

    n10, b10 = band(10.0)
    n1, b1 = band(1.0)
    return PercentileShares(
        ol_pct_total=100.0 * float(is_ol.sum()) / n,
        ol_pct_top10=ol_share(b10),
        ol_pct_top1=ol_share(b1),
        n_total=n,
        n_top10=n10,
        n_top1=n1,
        top10_value_share=float(values[b10].sum()) / total if n10 else float("nan"),
        top1_value_share=float(values[b1].sum()) / total if n1 else float("nan"),
        rank_decay=rank_decay,
    )


# -- circle-size sweep -----------------------------------------------------------


def circle_size_sweep(
    g: Graph,
    circles: CircleSet,
    k_values,
    p: SpreadParams,
    t: int,
    workers: int = 1,
) -> list:
    """Relative in/out differences as the minimum circle size k rises.

    The influence matrix is computed once; each k only refilters the circles
    and reclassifies. A k that empties a class (or zeroes the NOL mean) yields
    a flagged row instead of failing the sweep.
    """
    k_values = [int(k) for k in k_values]
    if any(b <= a for a, b in zip(k_values, k_values[1:])):
        raise ValueError("k_values must be strictly ascending")
    m = compute_ism(g, p, workers)
    c = m.evaluate(t)
    inv = in_centrality(c)
    outv = out_centrality(c)
    restricted = restrict_circles(circles, g)
    rows = []
    for k in k_values:
        part = classify_ol_nol(filter_min_circle_size(restricted, k), g)
        overlap = 100.0 * part.s / g.n
        mask = part.ol_mask(g.ids)
        try:
            d_in = group_relative_difference(inv, mask)
            d_out = group_relative_difference(outv, mask)
            rows.append(SweepRow(k, d_in, d_out, overlap, flagged=False))
        except ValueError as exc:
            rows.append(
                SweepRow(k, float("nan"), float("nan"), overlap, flagged=True, reason=str(exc))
            )
    return rows
