"""figgen command line: one figure per invocation.

`figgen --kind <k> --in <paths> --out <image> [--seed N]` renders one of the
five figure kinds from analysis result files. Exit code 0 on success, 1 on
any input or schema problem.
"""

from __future__ import annotations

import argparse
import sys

from .render import render
from .spec import KINDS, FigureSpec, SchemaError


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="figgen", description="Render result-file figures")
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--in", dest="inputs", required=True, nargs="+", help="result file(s)")
    ap.add_argument("--out", required=True, help="output image (.png or .svg)")
    ap.add_argument("--seed", type=int, default=0, help="jitter seed")
    ap.add_argument("--jitter", type=float, default=0.012, help="jitter magnitude")
    ap.add_argument("--band-alpha", type=float, default=0.18, help="shading opacity")
    return ap


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            out=args.out,
            seed=args.seed,
            jitter=args.jitter,
            band_alpha=args.band_alpha,
        )
        result = render(spec)
    except (SchemaError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.path} ({result.width_px}x{result.height_px})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
