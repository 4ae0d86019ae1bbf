"""Figure settings and input-schema validation.

Inputs are the result files the analysis pipeline emits (CSV with one
`#params=` echo line, or bootstrap JSON). Validation is by column set so a
wrong file for a kind fails with the missing columns named instead of a
confusing plot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("cdf", "lorenz", "temporal", "bootstrap-hist", "sweep")

REQUIRED_COLUMNS = {
    "cdf": {"dataset", "network_id", "node", "value", "node_class"},
    "lorenz": {"pop_fraction", "value_share"},
    "temporal": {"dataset", "network_id", "model", "metric", "T", "pct_delta", "sem"},
    "sweep": {"dataset", "network_id", "kind", "value", "pct_delta_in", "pct_delta_out", "flagged"},
}


class SchemaError(ValueError):
    """An input file does not carry the columns its figure kind needs."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    out: str
    seed: int = 0
    jitter: float = 0.012
    band_alpha: float = 0.18
    shade_mid: tuple = (10.0, 90.0)
    shade_top: tuple = (91.0, 99.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input file is required")
        for p in self.inputs:
            if not Path(p).exists():
                raise FileNotFoundError(f"input file not found: {p}")
        suffix = Path(self.out).suffix.lower()
        if suffix not in (".png", ".svg"):
            raise ValueError(f"output must be .png or .svg, got {self.out!r}")
        if self.jitter < 0:
            raise ValueError("jitter magnitude must be >= 0")
        if not 0 <= self.band_alpha <= 1:
            raise ValueError("band alpha must be in [0, 1]")


def read_table(path, kind: str):
    """Header, data rows and the echoed run parameters of one result CSV."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    required = REQUIRED_COLUMNS[kind]
    missing = required - set(header)
    if missing:
        raise SchemaError(
            f"{path}: not a {kind} input; missing column(s) {sorted(missing)}"
        )
    echo = {}
    body = lines[1:]
    if body and body[0].startswith("#params="):
        echo = json.loads(body[0][len("#params=") :])
        body = body[1:]
    rows = [line.split(",") for line in body if line]
    return header, rows, echo


def read_bootstrap(path):
    """Parsed bootstrap document; at least the per-network list must exist."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not JSON: {exc}") from None
    if not isinstance(doc, dict) or "networks" not in doc:
        raise SchemaError(f"{path}: not a bootstrap-hist input; missing column(s) ['networks']")
    for k, net in enumerate(doc["networks"]):
        if "network_id" not in net:
            raise SchemaError(f"{path}: networks[{k}]: missing column(s) ['network_id']")
        if "error" not in net:
            missing = sorted({"r", "ci_low", "ci_high", "samples"} - set(net))
            if missing:
                raise SchemaError(f"{path}: networks[{k}]: missing column(s) {missing}")
    return doc
