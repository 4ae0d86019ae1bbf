"""The full command pipeline on the bundled fixtures.

Runs every subcommand against the two-network fixture manifest and prints
the head of each result file. Outputs land in demos/out/ and are
byte-identical across reruns with the same seed.
"""

import json
from pathlib import Path

from overlap_spread import cli

HERE = Path(__file__).parent
DATA = HERE.parent / "tests" / "data"
OUT = HERE / "out"


def head(path, n=6):
    lines = Path(path).read_text().splitlines()
    print(f"\n$ head {path.name}")
    for line in lines[:n]:
        print(f"  {line[:140]}")
    if len(lines) > n:
        print(f"  ... {len(lines) - n} more lines")


def run(args):
    print(f"\n>>> overlap-spread {' '.join(args)}")
    rc = cli.main(args)
    print(f"exit code {rc}")
    assert rc == 0


def main():
    manifest = str(DATA / "multi.json")
    run(["stats", "--manifest", manifest, "--out", str(OUT)])
    head(OUT / "stats.csv")

    run(["temporal", "--manifest", manifest, "--metric", "out", "--out", str(OUT)])
    head(OUT / "temporal.csv")

    run(["bootstrap", "--manifest", manifest, "--metric", "out", "--t", "8",
         "--resamples", "1000", "--out", str(OUT)])
    doc = json.loads((OUT / "bootstrap.json").read_text())
    for net in doc["networks"]:
        print(f"  network {net['network_id']}: R={net['r']:.3f} "
              f"[{net['ci_low']:.3f}, {net['ci_high']:.3f}] seed={net['seed']}")

    run(["lorenz", "--manifest", manifest, "--metric", "out", "--t", "8", "--out", str(OUT)])
    head(OUT / "shares.csv", n=3)

    run(["sweep", "--manifest", manifest, "--values", "1,4,6", "--out", str(OUT)])
    head(OUT / "sweep.csv", n=9)

    run(["validate", "--graphs", "8", "--n-max", "8", "--l-max", "6",
         "--trials", "20000", "--seed", "2", "--out", str(OUT)])


if __name__ == "__main__":
    main()
