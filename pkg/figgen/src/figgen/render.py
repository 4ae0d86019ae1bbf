"""Renderers for the five figure kinds.

Every renderer draws from parsed result files only, never recomputes
analysis values, and never writes anything except the requested image. The
returned RenderResult carries the exact plotted series keyed by label so
determinism is testable without decoding pixels.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spec import FigureSpec, SchemaError, read_bootstrap, read_table

DPI = 120


@dataclass(frozen=True)
class RenderResult:
    path: str
    width_px: int
    height_px: int
    series: dict


def _col(header, row, name):
    return row[header.index(name)]


def _floats(header, rows, name):
    return np.array([float(_col(header, r, name)) for r in rows])


def _label(echo: dict, path, fallback: str = "") -> str:
    return str(echo.get("dataset", fallback or Path(path).stem))


def render(spec: FigureSpec) -> RenderResult:
    fig, series = _RENDERERS[spec.kind](spec)
    Path(spec.out).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out, dpi=DPI)
    w, h = fig.get_size_inches()
    plt.close(fig)
    return RenderResult(
        path=str(spec.out),
        width_px=int(round(w * DPI)),
        height_px=int(round(h * DPI)),
        series=series,
    )


def _render_cdf(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(7.2, 4.8))
    series = {}
    rng = np.random.default_rng(np.random.Philox(spec.seed))
    pooled = []
    for path in spec.inputs:
        header, rows, echo = read_table(path, "cdf")
        label = _label(echo, path)
        values = _floats(header, rows, "value")
        classes = np.array([_col(header, r, "node_class") for r in rows])
        pooled.append(values)
        for cls, color in (("NOL", "tab:blue"), ("OL", "tab:red")):
            vals = np.sort(values[classes == cls])
            if vals.size == 0:
                continue
            ecdf = np.arange(1, vals.size + 1) / vals.size
            name = f"{label} {cls}"
            ax.step(vals, ecdf, where="post", color=color, label=name, lw=1.4)
            # jitter separates the class markers without moving the curves
            offs = rng.uniform(-spec.jitter, spec.jitter, vals.size)
            pts = np.column_stack([vals, np.clip(ecdf + offs, 0.0, 1.0)])
            ax.plot(pts[:, 0], pts[:, 1], "o", color=color, ms=3.2, alpha=0.55, mew=0)
            series[name] = np.column_stack([vals, ecdf])
            series[f"{name} points"] = pts
    allv = np.concatenate(pooled)
    lo, hi = np.percentile(allv, spec.shade_mid)
    ax.axvspan(lo, hi, color="tab:gray", alpha=spec.band_alpha, lw=0,
               label=f"{spec.shade_mid[0]:g}-{spec.shade_mid[1]:g}%")
    t_lo, t_hi = np.percentile(allv, spec.shade_top)
    ax.axvspan(t_lo, t_hi, color="tab:orange", alpha=min(1.0, spec.band_alpha * 1.6), lw=0,
               label=f"{spec.shade_top[0]:g}-{spec.shade_top[1]:g}%")
    series["band mid"] = np.array([[lo, hi]])
    series["band top"] = np.array([[t_lo, t_hi]])
    pos = allv[allv > 0]
    if pos.size == allv.size and pos.size and pos.max() / pos.min() > 50:
        ax.set_xscale("log")
    ax.set_xlabel("metric value")
    ax.set_ylabel("cumulative density")
    ax.set_ylim(-0.03, 1.03)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, series


def _render_lorenz(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.4, 6.0))
    series = {}
    for path in spec.inputs:
        header, rows, echo = read_table(path, "lorenz")
        xs = _floats(header, rows, "pop_fraction")
        ys = _floats(header, rows, "value_share")
        label = _label(echo, path)
        ax.plot(xs, ys, lw=1.6, label=label)
        series[label] = np.column_stack([xs, ys])
    ax.plot([0, 1], [0, 1], ls="--", color="tab:gray", lw=1.0, label="equality")
    for guide in (0.1, 0.9):
        ax.axvline(guide, ls=":", color="black", lw=0.9)
    ax.set_xlabel("population share (ascending)")
    ax.set_ylabel("value share")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, series


def _render_temporal(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(7.2, 4.8))
    series = {}
    for path in spec.inputs:
        header, rows, echo = read_table(path, "temporal")
        label = _label(echo, path)
        nets = {}
        for r in rows:
            if _col(header, r, "T") == "":
                continue  # skip-marker row
            nets.setdefault(_col(header, r, "network_id"), []).append(r)
        chosen = {"aggregate": nets["aggregate"]} if "aggregate" in nets else nets
        for net, net_rows in chosen.items():
            ts = _floats(header, net_rows, "T")
            ds = np.array(
                [float(v) if v else np.nan for v in (_col(header, r, "pct_delta") for r in net_rows)]
            )
            name = label if net == "aggregate" else f"{label} {net}"
            line = ax.plot(ts, ds, lw=1.6, label=name)[0]
            series[name] = np.column_stack([ts, ds])
            if net == "aggregate":
                sems = np.array(
                    [float(v) if v else np.nan for v in (_col(header, r, "sem") for r in net_rows)]
                )
                band = ~np.isnan(sems) & ~np.isnan(ds)
                if band.any():
                    ax.fill_between(
                        ts[band], (ds - sems)[band], (ds + sems)[band],
                        color=line.get_color(), alpha=spec.band_alpha, lw=0,
                    )
                    series[f"{name} band"] = np.column_stack(
                        [ts[band], (ds - sems)[band], (ds + sems)[band]]
                    )
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel("T")
    ax.set_ylabel("relative difference of class means (%)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, series


def _render_bootstrap(spec: FigureSpec):
    nets = []
    for path in spec.inputs:
        doc = read_bootstrap(path)
        label = str(doc.get("dataset", Path(path).stem))
        for net in doc["networks"]:
            if "error" in net:
                continue
            nets.append((f"{label} {net['network_id']}", net))
    if not nets:
        raise SchemaError("no successful bootstrap rows to plot")
    ncols = 1 if len(nets) == 1 else 2
    nrows = (len(nets) + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(7.2, 2.8 * nrows), squeeze=False)
    series = {}
    for k, (name, net) in enumerate(nets):
        ax = axes[k // ncols][k % ncols]
        samples = np.sort(np.array([s for s in net["samples"] if s is not None], dtype=float))
        if samples.size and samples[0] == samples[-1]:
            # degenerate resampling distribution collapses to a single bar
            ax.bar([samples[0]], [samples.size], width=max(abs(samples[0]) * 0.02, 0.01))
        else:
            ax.hist(samples, bins=40, color="tab:blue", alpha=0.8)
        ax.axvline(net["r"], color="black", lw=1.2)
        ax.axvline(net["ci_low"], color="tab:red", ls="--", lw=1.0)
        ax.axvline(net["ci_high"], color="tab:red", ls="--", lw=1.0)
        ax.set_title(f"{name}: R={net['r']:.3g}", fontsize=9)
        series[name] = samples
    for k in range(len(nets), nrows * ncols):
        axes[k // ncols][k % ncols].axis("off")
    fig.supxlabel("geometric-mean ratio", fontsize=9)
    fig.supylabel("resamples", fontsize=9)
    fig.tight_layout()
    return fig, series


def _render_sweep(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(7.2, 4.8))
    series = {}
    log_x = False
    for path in spec.inputs:
        header, rows, echo = read_table(path, "sweep")
        label = _label(echo, path)
        log_x = log_x or echo.get("kind") == "edge-weight"
        nets = {}
        for r in rows:
            nets.setdefault(_col(header, r, "network_id"), []).append(r)
        for net, net_rows in nets.items():
            ok = [r for r in net_rows if _col(header, r, "flagged") == "false"]
            flagged = [r for r in net_rows if _col(header, r, "flagged") == "true"]
            name = f"{label} {net}"
            if ok:
                xs = _floats(header, ok, "value")
                d_out = _floats(header, ok, "pct_delta_out")
                d_in = _floats(header, ok, "pct_delta_in")
                ax.plot(xs, d_out, "-o", ms=4, lw=1.5, label=f"{name} out")
                ax.plot(xs, d_in, "--s", ms=4, lw=1.2, label=f"{name} in")
                series[f"{name} out"] = np.column_stack([xs, d_out])
                series[f"{name} in"] = np.column_stack([xs, d_in])
            for r in flagged:
                # a threshold that empties a class has no difference to plot
                ax.axvline(float(_col(header, r, "value")), color="tab:gray", ls=":", lw=1.0)
            if flagged:
                series[f"{name} flagged"] = _floats(header, flagged, "value")
    if log_x:
        ax.set_xscale("log")
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel("sweep value")
    ax.set_ylabel("relative difference of class means (%)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, series


_RENDERERS = {
    "cdf": _render_cdf,
    "lorenz": _render_lorenz,
    "temporal": _render_temporal,
    "bootstrap-hist": _render_bootstrap,
    "sweep": _render_sweep,
}
