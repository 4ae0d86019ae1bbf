"""End-to-end command pipeline.

`overlap-spread <stats|temporal|bootstrap|lorenz|sweep|validate>` reads a JSON
run manifest, extracts the networks it describes, computes influence matrices
and metrics, and writes CSV/JSON results. Outputs are byte-deterministic for a
fixed (manifest, seed): no timestamps, canonical row order, numbers at 12
significant digits, and a `#params=` echo line after each CSV header carrying
the resolved configuration.

Exit codes: 0 success, 1 input error, 2 validation failure, 3 budget overflow.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import metrics as mx
from .engine import InfluenceMatrix, SpreadParams, compute_ism, load_matrix, save_matrix
from .errors import BudgetExceededError, ManifestError, OverlapSpreadError, ParseError
from .graphio import (
    CircleSet,
    Graph,
    NodePartition,
    attribute_circles,
    classify_ol_nol,
    extract_ego_network,
    filter_min_circle_size,
    network_stats,
    parse_attributes,
    parse_circles,
    parse_edge_list,
    restrict_circles,
    select_ego_candidates,
    top_n_circles,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3

DEFAULT_EGO_MIN_DEG = 500
DEFAULT_EGO_MAX_DEG = 1500
DEFAULT_RESAMPLES = 10_000


# -- manifest -----------------------------------------------------------------


@dataclass(frozen=True)
class CircleSource:
    """Where a network's circles come from: a circle file or an attribute table."""

    path: str | None = None
    fmt: str | None = None
    attributes: str | None = None
    select: tuple = ()

    def describe(self) -> dict:
        if self.attributes is not None:
            return {"attributes": self.attributes, "select": list(self.select)}
        return {"path": self.path, "format": self.fmt}


@dataclass(frozen=True)
class NetworkSpec:
    network_id: str
    edge_list: str
    circles: CircleSource


@dataclass(frozen=True)
class EgoSpec:
    edge_list: str
    circles: CircleSource
    min_deg: int = DEFAULT_EGO_MIN_DEG
    max_deg: int = DEFAULT_EGO_MAX_DEG


@dataclass(frozen=True)
class RunManifest:
    dataset: str
    networks: tuple = ()
    ego: EgoSpec | None = None
    min_circle_size: int = 1
    top_n_circles: int | None = None
    params: SpreadParams = SpreadParams()
    saturation_centrality: int = 50
    saturation_betweenness: int = 30
    seed: int = 1
    workers: int = 1
    out_dir: str = "results"
    betweenness_networks: object = None  # int count, list of ids, or None = all
    cache_dir: str | None = None
    sweep: dict | None = None

    def describe(self) -> dict:
        from dataclasses import asdict

        d = {
            "dataset": self.dataset,
            "min_circle_size": self.min_circle_size,
            "top_n_circles": self.top_n_circles,
            "params": asdict(self.params),
            "saturation_t": {
                "centrality": self.saturation_centrality,
                "betweenness": self.saturation_betweenness,
            },
            "seed": self.seed,
            "workers": self.workers,
            "betweenness_networks": self.betweenness_networks,
        }
        if self.ego is not None:
            d["ego"] = {
                "edge_list": self.ego.edge_list,
                "circles": self.ego.circles.describe(),
                "min_deg": self.ego.min_deg,
                "max_deg": self.ego.max_deg,
            }
        else:
            d["networks"] = [
                {"id": n.network_id, "edge_list": n.edge_list, "circles": n.circles.describe()}
                for n in self.networks
            ]
        if self.sweep is not None:
            d["sweep"] = self.sweep
        return d


def _require_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ManifestError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _circle_source(obj: dict, base: Path, where: str) -> CircleSource:
    _require_keys(obj, {"path", "format", "attributes", "select"}, where)
    if "attributes" in obj:
        if "select" not in obj or not obj["select"]:
            raise ManifestError(f"{where}: attribute circles need a non-empty 'select' list")
        return CircleSource(
            attributes=str(base / obj["attributes"]), select=tuple(obj["select"])
        )
    if "path" not in obj or "format" not in obj:
        raise ManifestError(f"{where}: circle source needs 'path' and 'format' (or 'attributes')")
    return CircleSource(path=str(base / obj["path"]), fmt=obj["format"])


def load_manifest(path) -> RunManifest:
    """Parse and validate a manifest file; unknown keys are rejected so typos
    fail loudly instead of silently falling back to defaults. All data paths
    resolve relative to the manifest's own directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ManifestError("manifest root must be a JSON object")
    base = path.parent
    _require_keys(
        raw,
        {
            "dataset",
            "networks",
            "edge_list",
            "circles",
            "ego",
            "min_circle_size",
            "top_n_circles",
            "params",
            "saturation_t",
            "seed",
            "workers",
            "out_dir",
            "betweenness_networks",
            "cache_dir",
            "sweep",
        },
        "manifest",
    )
    if "dataset" not in raw:
        raise ManifestError("manifest needs a 'dataset' label")

    params_raw = dict(raw.get("params", {}))
    _require_keys(
        params_raw,
        {"model", "uniform_edge_weight", "l_max", "prune_eps", "t_grid", "route_budget"},
        "params",
    )
    if "t_grid" in params_raw and params_raw["t_grid"] is not None:
        params_raw["t_grid"] = tuple(params_raw["t_grid"])
    try:
        params = SpreadParams(**params_raw)
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"bad params: {exc}") from None

    sat = dict(raw.get("saturation_t", {}))
    _require_keys(sat, {"centrality", "betweenness"}, "saturation_t")
    sat_c = int(sat.get("centrality", min(50, params.l_max)))
    sat_b = int(sat.get("betweenness", min(30, params.l_max)))
    for name, val in (("centrality", sat_c), ("betweenness", sat_b)):
        if not 1 <= val <= params.l_max:
            raise ManifestError(f"saturation_t.{name}={val} outside [1, l_max={params.l_max}]")

    networks: list = []
    ego: EgoSpec | None = None
    if "ego" in raw:
        if "edge_list" not in raw or "circles" not in raw:
            raise ManifestError("ego extraction needs top-level 'edge_list' and 'circles'")
        ego_raw = dict(raw["ego"])
        _require_keys(ego_raw, {"min_deg", "max_deg"}, "ego")
        # a '{ego}' placeholder means per-ego circle files; a plain path is a
        # global circle file restricted to each extracted network
        circles = _circle_source(dict(raw["circles"]), base, "circles")
        ego = EgoSpec(
            edge_list=str(base / raw["edge_list"]),
            circles=circles,
            min_deg=int(ego_raw.get("min_deg", DEFAULT_EGO_MIN_DEG)),
            max_deg=int(ego_raw.get("max_deg", DEFAULT_EGO_MAX_DEG)),
        )
    elif "networks" in raw:
        shared = dict(raw["circles"]) if "circles" in raw else None
        for k, entry in enumerate(raw["networks"]):
            entry = dict(entry)
            _require_keys(entry, {"id", "edge_list", "circles"}, f"networks[{k}]")
            if "id" not in entry or "edge_list" not in entry:
                raise ManifestError(f"networks[{k}] needs 'id' and 'edge_list'")
            cobj = dict(entry["circles"]) if "circles" in entry else shared
            if cobj is None:
                raise ManifestError(f"networks[{k}] has no circle source")
            networks.append(
                NetworkSpec(
                    network_id=str(entry["id"]),
                    edge_list=str(base / entry["edge_list"]),
                    circles=_circle_source(cobj, base, f"networks[{k}].circles"),
                )
            )
    elif "edge_list" in raw:
        if "circles" not in raw:
            raise ManifestError("single-network manifest needs 'circles'")
        networks.append(
            NetworkSpec(
                network_id=str(raw["dataset"]),
                edge_list=str(base / raw["edge_list"]),
                circles=_circle_source(dict(raw["circles"]), base, "circles"),
            )
        )
    else:
        raise ManifestError("manifest needs 'networks', 'edge_list' or an 'ego' pipeline")

    out_dir = raw.get("out_dir", "results")
    cache_dir = raw.get("cache_dir")
    return RunManifest(
        dataset=str(raw["dataset"]),
        networks=tuple(networks),
        ego=ego,
        min_circle_size=int(raw.get("min_circle_size", 1)),
        top_n_circles=None if raw.get("top_n_circles") is None else int(raw["top_n_circles"]),
        params=params,
        saturation_centrality=sat_c,
        saturation_betweenness=sat_b,
        seed=int(raw.get("seed", 1)),
        workers=int(raw.get("workers", 1)),
        out_dir=str(out_dir),
        betweenness_networks=raw.get("betweenness_networks"),
        cache_dir=None if cache_dir is None else str(base / cache_dir),
        sweep=raw.get("sweep"),
    )


# -- network assembly -----------------------------------------------------------


@dataclass(frozen=True)
class NetworkBundle:
    """One analysis-ready network: graph, filtered circles, OL/NOL split.
    circles_unfiltered keeps the restricted-but-unthresholded set so sweeps
    can re-apply their own minimum size."""

    network_id: str
    graph: Graph
    circles: CircleSet
    circles_unfiltered: CircleSet
    part: NodePartition


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise ManifestError(f"input file not found: {p}")
    return p.read_text()


def _load_circle_set(src: CircleSource, ego: int | None = None) -> CircleSet:
    if src.attributes is not None:
        table = parse_attributes(_read_text(src.attributes))
        return attribute_circles(table, src.select)
    path = src.path if ego is None else src.path.replace("{ego}", str(ego))
    return parse_circles(_read_text(path), src.fmt)


def _bundle(network_id: str, g: Graph, raw_circles: CircleSet, man: RunManifest) -> NetworkBundle:
    c = restrict_circles(raw_circles, g)
    if man.top_n_circles is not None:
        c = top_n_circles(c, man.top_n_circles)
    filtered = filter_min_circle_size(c, man.min_circle_size)
    return NetworkBundle(
        network_id=network_id,
        graph=g,
        circles=filtered,
        circles_unfiltered=c,
        part=classify_ol_nol(filtered, g),
    )


def load_networks(man: RunManifest) -> list:
    """All analysis networks of a manifest in canonical (id) order."""
    bundles = []
    if man.ego is not None:
        g_full = parse_edge_list(_read_text(man.ego.edge_list))
        per_ego = man.ego.circles.path is not None and "{ego}" in man.ego.circles.path
        shared = None if per_ego else _load_circle_set(man.ego.circles)
        skipped = []
        for cand in select_ego_candidates(g_full, man.ego.min_deg, man.ego.max_deg):
            if per_ego:
                cpath = Path(man.ego.circles.path.replace("{ego}", str(cand)))
                if not cpath.exists():
                    skipped.append(cand)
                    continue
            ego_g = extract_ego_network(g_full, cand)
            if ego_g.n == 0:
                print(f"warning: ego {cand} has no connected friends; skipped", file=sys.stderr)
                continue
            circles = _load_circle_set(man.ego.circles, cand) if per_ego else shared
            bundles.append(_bundle(f"ego{cand}", ego_g, circles, man))
        if skipped:
            print(
                f"warning: {len(skipped)} degree-eligible node(s) without a circle file "
                f"were not treated as egos",
                file=sys.stderr,
            )
    else:
        for spec in man.networks:
            g = parse_edge_list(_read_text(spec.edge_list))
            bundles.append(_bundle(spec.network_id, g, _load_circle_set(spec.circles), man))
    bundles.sort(key=lambda b: b.network_id)
    return bundles


# -- influence matrices with optional cache ----------------------------------------


def _graph_digest(g: Graph) -> str:
    h = hashlib.sha256()
    for arr in (g.ids, g.edges, g.edge_weight, g.node_weight):
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def get_ism(bundle: NetworkBundle, params: SpreadParams, workers: int, cache_dir: str | None) -> InfluenceMatrix:
    if cache_dir is None:
        return compute_ism(bundle.graph, params, workers)
    from dataclasses import asdict

    key_src = json.dumps(
        {"graph": _graph_digest(bundle.graph), "params": asdict(params)},
        sort_keys=True,
        separators=(",", ":"),
    )
    key = hashlib.sha256(key_src.encode()).hexdigest()[:24]
    cdir = Path(cache_dir)
    cdir.mkdir(parents=True, exist_ok=True)
    cpath = cdir / f"ism_{key}.npz"
    if cpath.exists():
        return load_matrix(cpath)
    m = compute_ism(bundle.graph, params, workers)
    save_matrix(m, cpath)
    return m


# -- output helpers ------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return ""
        return "%.12g" % float(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(path, columns, echo: str, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        fh.write(f"#params={echo}\n")
        for row in rows:
            w.writerow([_fmt(c) for c in row])


def _echo(man: RunManifest, command: str, **extra) -> str:
    d = man.describe()
    d["command"] = command
    d.update(extra)
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


def _metric_values(
    bundle: NetworkBundle, m: InfluenceMatrix, metric: str, t: int, man: RunManifest
) -> np.ndarray:
    if metric == "in":
        return mx.in_centrality(m.evaluate(t))
    if metric == "out":
        return mx.out_centrality(m.evaluate(t))
    if metric == "betweenness":
        return mx.betweenness_all(bundle.graph, man.params, t, workers=man.workers, base=m)
    raise ManifestError(f"unknown metric {metric!r}")


def _saturation_t(man: RunManifest, metric: str) -> int:
    return man.saturation_betweenness if metric == "betweenness" else man.saturation_centrality


def _betweenness_bundle_subset(bundles: list, man: RunManifest) -> list:
    """Cost control for the expensive vertex-removal runs: betweenness runs on
    a subsample, either an explicit id list or a seed-deterministic draw."""
    sel = man.betweenness_networks
    if sel is None:
        return bundles
    if isinstance(sel, list):
        wanted = {str(s) for s in sel}
        chosen = [b for b in bundles if b.network_id in wanted]
        missing = wanted - {b.network_id for b in chosen}
        if missing:
            raise ManifestError(f"betweenness_networks names unknown network(s): {sorted(missing)}")
        return chosen
    count = int(sel)
    if count >= len(bundles):
        return bundles
    rng = np.random.Generator(np.random.Philox(man.seed))
    idx = np.sort(rng.permutation(len(bundles))[:count])
    return [bundles[i] for i in idx]


# -- commands -----------------------------------------------------------------------


def cmd_stats(man: RunManifest, out_dir: Path) -> int:
    bundles = load_networks(man)
    columns = ["dataset", "network_id", "n_nodes", "n_edges", "avg_degree", "avg_clustering", "overlap_pct"]
    rows = []
    per_col: dict = {c: [] for c in columns[2:]}
    for b in bundles:
        s = network_stats(b.graph, b.part)
        vals = [s.n_nodes, s.n_edges, s.avg_degree, s.avg_clustering, s.overlap_pct]
        rows.append([man.dataset, b.network_id] + vals)
        for c, v in zip(columns[2:], vals):
            per_col[c].append(float(v))
    if bundles:
        summary = [man.dataset, "summary"]
        for c in columns[2:]:
            v = per_col[c]
            summary.append("%.6g (%.6g-%.6g)" % (sum(v) / len(v), min(v), max(v)))
        rows.append(summary)
    else:
        print("warning: no networks extracted; summary empty", file=sys.stderr)
        rows.append([man.dataset, "summary"] + ["empty"] * 5)
    write_csv(out_dir / "stats.csv", columns, _echo(man, "stats"), rows)
    return EXIT_OK


def _betweenness_series(g: Graph, p: SpreadParams, ts, workers: int) -> np.ndarray:
    """Per-node betweenness at every requested time from one matrix per removal."""
    full = mx.cohesion_series(compute_ism(g, p, workers), ts)
    out = np.empty((g.n, len(ts)))
    for k, node in enumerate(g.ids):
        red = g.remove_node(int(node))
        ci = (
            mx.cohesion_series(compute_ism(red, p, workers), ts)
            if red.n
            else np.zeros(len(ts))
        )
        with np.errstate(invalid="ignore", divide="ignore"):
            b = (full - ci) / full
        out[k] = np.where(full > 0.0, np.maximum(b, 0.0), np.nan)
    return out


def cmd_temporal(man: RunManifest, out_dir: Path, metric: str, model: str | None) -> int:
    params = man.params if model is None else replace(man.params, model=model)
    man = replace(man, params=params)
    ts = params.times()
    bundles = load_networks(man)
    if metric == "betweenness":
        bundles = _betweenness_bundle_subset(bundles, man)
    columns = ["dataset", "network_id", "model", "metric", "T", "pct_delta", "sem", "note"]
    rows = []
    per_network: dict = {}
    for b in bundles:
        if b.part.s == 0 or b.part.t == 0:
            which = "OL" if b.part.s == 0 else "NOL"
            print(f"warning: network {b.network_id} skipped ({which} class empty)", file=sys.stderr)
            rows.append(
                [man.dataset, b.network_id, params.model, metric, None, None, None, f"skipped: {which} class empty"]
            )
            continue
        mask = b.part.ol_mask(b.graph.ids)
        series = np.full(len(ts), np.nan)
        if metric == "betweenness":
            bseries = _betweenness_series(b.graph, params, ts, man.workers)
            for j in range(len(ts)):
                col = bseries[:, j]
                if np.isnan(col).any():
                    continue
                try:
                    series[j] = mx.group_relative_difference(col, mask)
                except ValueError:
                    pass
        else:
            m = get_ism(b, params, man.workers, man.cache_dir)
            for j, t in enumerate(ts):
                c = m.evaluate(t)
                vals = mx.in_centrality(c) if metric == "in" else mx.out_centrality(c)
                try:
                    series[j] = mx.group_relative_difference(vals, mask)
                except ValueError:
                    pass
        per_network[b.network_id] = series
        for j, t in enumerate(ts):
            rows.append([man.dataset, b.network_id, params.model, metric, t, series[j], None, None])
    if per_network:
        agg = mx.aggregate_networks(metric, ts, per_network)
        for j, t in enumerate(ts):
            rows.append(
                [man.dataset, "aggregate", params.model, metric, t, agg.mean[j], agg.sem[j], None]
            )
    write_csv(
        out_dir / "temporal.csv",
        columns,
        _echo(man, "temporal", metric=metric),
        rows,
    )
    return EXIT_OK


def cmd_bootstrap(
    man: RunManifest, out_dir: Path, metric: str, model: str | None, t: int | None, n_resamples: int
) -> int:
    params = man.params if model is None else replace(man.params, model=model)
    man = replace(man, params=params)
    t = _saturation_t(man, metric) if t is None else int(t)
    bundles = load_networks(man)
    if metric == "betweenness":
        bundles = _betweenness_bundle_subset(bundles, man)
    nets = []
    failures = 0
    for k, b in enumerate(bundles):
        seed_k = man.seed + k  # canonical order makes the derivation reproducible
        try:
            m = get_ism(b, params, man.workers, man.cache_dir)
            vals = _metric_values(b, m, metric, t, man)
            r = mx.bootstrap_gm_ratio(vals, b.part.ol_mask(b.graph.ids), n_resamples, seed_k)
            nets.append(
                {
                    "network_id": b.network_id,
                    "r": r.r,
                    "ci_low": r.ci_low,
                    "ci_high": r.ci_high,
                    "excluded_zeros": r.excluded_zeros,
                    "n_ol": b.part.s,
                    "n_nol": b.part.t,
                    "seed": seed_k,
                    "samples": [None if math.isnan(x) else float(x) for x in r.samples],
                }
            )
        except ValueError as exc:
            failures += 1
            print(f"warning: network {b.network_id}: {exc}", file=sys.stderr)
            nets.append({"network_id": b.network_id, "error": str(exc), "seed": seed_k})
    doc = {
        "command": "bootstrap",
        "dataset": man.dataset,
        "model": params.model,
        "metric": metric,
        "t": t,
        "n_resamples": n_resamples,
        "base_seed": man.seed,
        "resampling_unit": "node values within classes, resampled per network",
        "manifest": man.describe(),
        "networks": nets,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bootstrap.json").write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    if nets and failures == len(nets):
        print("error: bootstrap failed on every network", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_lorenz(
    man: RunManifest, out_dir: Path, metric: str, model: str | None, t: int | None
) -> int:
    params = man.params if model is None else replace(man.params, model=model)
    man = replace(man, params=params)
    t = _saturation_t(man, metric) if t is None else int(t)
    bundles = load_networks(man)
    if metric == "betweenness":
        bundles = _betweenness_bundle_subset(bundles, man)
    pooled = []
    pooled_mask = []
    value_rows = []
    for b in bundles:
        m = get_ism(b, params, man.workers, man.cache_dir)
        vals = _metric_values(b, m, metric, t, man)
        mask = b.part.ol_mask(b.graph.ids)
        pooled.append(vals)
        pooled_mask.append(mask)
        for node, v, ol in zip(b.graph.ids, vals, mask):
            value_rows.append(
                [man.dataset, b.network_id, int(node), float(v), "OL" if ol else "NOL"]
            )
    if not pooled:
        print("error: no networks to pool", file=sys.stderr)
        return EXIT_INPUT
    values = np.concatenate(pooled)
    mask = np.concatenate(pooled_mask)
    lz = mx.lorenz(values)
    shares = mx.percentile_class_shares(values, mask)
    echo = _echo(man, "lorenz", metric=metric, t=t)
    write_csv(
        out_dir / "lorenz.csv",
        ["pop_fraction", "value_share"],
        echo,
        [[x, y] for x, y in lz.curve],
    )
    write_csv(
        out_dir / "shares.csv",
        [
            "dataset", "model", "metric", "t", "n_total", "n_top10", "n_top1",
            "ol_pct_total", "ol_pct_top10", "ol_pct_top1",
            "top10_value_share", "top1_value_share",
            "lorenz_bulk_share", "lorenz_top10_share", "lorenz_top1_share",
        ],
        echo,
        [[
            man.dataset, params.model, metric, t,
            shares.n_total, shares.n_top10, shares.n_top1,
            shares.ol_pct_total, shares.ol_pct_top10, shares.ol_pct_top1,
            shares.top10_value_share, shares.top1_value_share,
            lz.bulk_share, lz.top10_share, lz.top1_share,
        ]],
    )
    write_csv(
        out_dir / "values.csv",
        ["dataset", "network_id", "node", "value", "node_class"],
        echo,
        value_rows,
    )
    return EXIT_OK


def cmd_sweep(
    man: RunManifest, out_dir: Path, kind: str | None, values_arg: str | None,
    metric_t: int | None, model: str | None,
) -> int:
    params = man.params if model is None else replace(man.params, model=model)
    man = replace(man, params=params)
    cfg = dict(man.sweep or {})
    _require_keys(cfg, {"kind", "values"}, "sweep")
    kind = kind or cfg.get("kind")
    if kind not in ("circle-size", "edge-weight"):
        raise ManifestError("sweep kind must be 'circle-size' or 'edge-weight'")
    if values_arg is not None:
        tokens = [v for v in values_arg.split(",") if v]
    else:
        tokens = [str(v) for v in cfg.get("values", [])]
    if not tokens:
        raise ManifestError("sweep needs values (manifest sweep.values or --values)")
    t = _saturation_t(man, "in") if metric_t is None else int(metric_t)
    bundles = load_networks(man)
    columns = [
        "dataset", "network_id", "kind", "value",
        "pct_delta_in", "pct_delta_out", "overlap_pct", "mean_c", "flagged", "reason",
    ]
    rows = []
    if kind == "circle-size":
        ks = [int(v) for v in tokens]
        for b in bundles:
            m = get_ism(b, params, man.workers, man.cache_dir)
            c = m.evaluate(t)
            mean_c = mx.cohesion(c) / (b.graph.n * (b.graph.n - 1)) if b.graph.n > 1 else float("nan")
            for row in mx.circle_size_sweep(b.graph, b.circles_unfiltered, ks, params, t, man.workers):
                rows.append([
                    man.dataset, b.network_id, kind, row.k,
                    row.pct_delta_in, row.pct_delta_out, row.overlap_pct,
                    mean_c, row.flagged, row.reason,
                ])
    else:
        ws = [float(v) for v in tokens]
        if any(b <= a for a, b in zip(ws, ws[1:])):
            raise ManifestError("edge-weight values must be strictly ascending")
        for b in bundles:
            mask = b.part.ol_mask(b.graph.ids)
            overlap = 100.0 * b.part.s / b.graph.n
            for w in ws:
                pw = replace(params, uniform_edge_weight=w)
                m = get_ism(b, pw, man.workers, man.cache_dir)
                c = m.evaluate(min(t, pw.l_max))
                mean_c = mx.cohesion(c) / (b.graph.n * (b.graph.n - 1)) if b.graph.n > 1 else float("nan")
                try:
                    d_in = mx.group_relative_difference(mx.in_centrality(c), mask)
                    d_out = mx.group_relative_difference(mx.out_centrality(c), mask)
                    rows.append([man.dataset, b.network_id, kind, w, d_in, d_out, overlap, mean_c, False, ""])
                except ValueError as exc:
                    rows.append([man.dataset, b.network_id, kind, w, None, None, overlap, mean_c, True, str(exc)])
    write_csv(
        out_dir / "sweep.csv",
        columns,
        _echo(man, "sweep", kind=kind, values=tokens, t=t),
        rows,
    )
    return EXIT_OK


def cmd_validate(
    out_dir: Path | None,
    n_graphs: int,
    n_max: int,
    l_max: int,
    seed: int,
    trials: int,
    perturb: float,
) -> int:
    from .oracle import compare_with_engine, exhaustive_reach, percolation_mc

    lines = []
    ok = True

    def emit(s: str):
        lines.append(s)
        print(s)

    emit(f"validate: {n_graphs} random graphs (n <= {n_max}), l_max={l_max}, "
         f"prune_eps=0, both models, tolerance 1e-12")
    if perturb:
        emit(f"validate: engine outputs perturbed by {perturb:g} (test hook)")
    for k in range(n_graphs):
        rng = np.random.default_rng(seed + k)
        n = int(rng.integers(2, n_max + 1))
        # always keep one edge so perturbation injection is observable everywhere
        pairs = [(0, 1)] + [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.3]
        g = Graph.from_edges(pairs, node_ids=range(n), edge_weight=0.3)
        for model in ("sc", "cc"):
            p = SpreadParams(model=model, l_max=l_max, prune_eps=0.0)
            m = compute_ism(g, p)
            if perturb:
                m = InfluenceMatrix(m.ids, m.params, m.log_survival - abs(perturb))
            rep = compare_with_engine(m, g, p)
            status = "PASS" if rep.passed else "FAIL"
            ok = ok and rep.passed
            extra = ""
            if not rep.passed and rep.worst is not None:
                i, j, t = rep.worst
                extra = f" worst pair ({i}->{j}) at t={t}"
            emit(
                f"fixture seed={seed + k} model={model} n={n} m={g.m} "
                f"max_abs_diff={rep.max_abs_diff:.3e} {status}{extra}"
            )
    # Monte Carlo tree diagnostic: unique routes make percolation and the
    # independent-route rule coincide, so a binomial bound is assertable
    tree = Graph.from_edges([(0, 1), (1, 2), (1, 3), (3, 4)], edge_weight=0.3)
    p = SpreadParams(model="sc", l_max=4, prune_eps=0.0)
    truth = exhaustive_reach(tree, p, [4])[4]
    freq = percolation_mc(tree, 4, trials, seed=seed)
    off = ~np.eye(tree.n, dtype=bool)
    sigma = np.sqrt(truth * (1.0 - truth) / trials)
    worst_z = float(np.max(np.abs(freq - truth)[off] / np.maximum(sigma[off], 1e-15)))
    mc_ok = bool(np.all(np.abs(freq - truth)[off] <= 3.0 * sigma[off] + 1e-12))
    ok = ok and mc_ok
    emit(f"mc tree diagnostic: trials={trials} worst |z|={worst_z:.2f} "
         f"{'PASS' if mc_ok else 'FAIL'} (3-sigma binomial bound)")
    emit("validate: " + ("ALL PASS" if ok else "FAILURES PRESENT"))
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "validation.txt").write_text("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VALIDATION


# -- entry point ----------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="overlap-spread",
        description="Influence spreading analysis over networks with overlapping circles",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, manifest=True):
        if manifest:
            sp.add_argument("--manifest", required=True, help="run manifest JSON path")
        sp.add_argument("--model", choices=["sc", "cc"], help="override the manifest model")
        sp.add_argument("--seed", type=int, help="override the manifest seed")
        sp.add_argument("--workers", type=int, help="override the manifest worker count")
        sp.add_argument("--out", help="override the manifest output directory")

    sp = sub.add_parser("stats", help="network summary table")
    common(sp)
    sp = sub.add_parser("temporal", help="OL/NOL relative difference over the time grid")
    common(sp)
    sp.add_argument("--metric", choices=["in", "out", "betweenness"], default="out")
    sp = sub.add_parser("bootstrap", help="geometric-mean ratios with bootstrap bounds")
    common(sp)
    sp.add_argument("--metric", choices=["in", "out", "betweenness"], default="out")
    sp.add_argument("--t", type=int, help="evaluation time (default: saturation marker)")
    sp.add_argument("--resamples", type=int, default=DEFAULT_RESAMPLES)
    sp = sub.add_parser("lorenz", help="pooled concentration curve and class shares")
    common(sp)
    sp.add_argument("--metric", choices=["in", "out", "betweenness"], default="betweenness")
    sp.add_argument("--t", type=int, help="evaluation time (default: saturation marker)")
    sp = sub.add_parser("sweep", help="circle-size or edge-weight sweeps")
    common(sp)
    sp.add_argument("--kind", choices=["circle-size", "edge-weight"])
    sp.add_argument("--values", help="comma-separated sweep values")
    sp.add_argument("--t", type=int, help="evaluation time (default: saturation marker)")
    sp = sub.add_parser("validate", help="oracle equivalence and MC diagnostics")
    sp.add_argument("--graphs", type=int, default=50)
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--l-max", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--perturb", type=float, default=0.0, help="test hook: inflate engine output")
    sp.add_argument("--out", help="also write validation.txt here")
    return ap


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for bad arguments; 2 is reserved for validation failures
        return EXIT_OK if not exc.code else EXIT_INPUT
    try:
        if args.command == "validate":
            return cmd_validate(
                Path(args.out) if args.out else None,
                args.graphs, args.n_max, args.l_max, args.seed, args.trials, args.perturb,
            )
        man = load_manifest(args.manifest)
        if args.seed is not None:
            man = replace(man, seed=args.seed)
        if args.workers is not None:
            man = replace(man, workers=args.workers)
        out_dir = Path(args.out) if args.out else Path(man.out_dir)
        if args.command == "stats":
            return cmd_stats(man, out_dir)
        if args.command == "temporal":
            return cmd_temporal(man, out_dir, args.metric, args.model)
        if args.command == "bootstrap":
            return cmd_bootstrap(man, out_dir, args.metric, args.model, args.t, args.resamples)
        if args.command == "lorenz":
            return cmd_lorenz(man, out_dir, args.metric, args.model, args.t)
        if args.command == "sweep":
            return cmd_sweep(man, out_dir, args.kind, args.values, args.t, args.model)
        raise ManifestError(f"unknown command {args.command!r}")
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ManifestError, ParseError, OverlapSpreadError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
