import json
import shutil
import subprocess
import sys

import pytest

EDGES_A = """0\t1
1\t2
2\t3
3\t4
4\t5
5\t0
4\t6
4\t7
6\t7
6\t8
7\t9
8\t9
5\t8
0\t10
10\t11
11\t12
12\t13
13\t0
10\t12
"""

CIRCLES_A = "ring\t0\t1\t2\t3\t4\t5\nfan\t4\t5\t6\t7\t8\t9\nloop\t0\t10\t11\t12\t13\n"

EDGES_B = "0\t1\n1\t2\n2\t3\n0\t2\n3\t4\n4\t5\n5\t6\n3\t5\n6\t7\n7\t8\n8\t9\n6\t8\n"

CIRCLES_B = "west\t0\t1\t2\t3\nmid\t3\t4\t5\t6\neast\t6\t7\t8\t9\n"


def spread_cli(args):
    """The analysis pipeline is consumed through its command line only."""
    exe = shutil.which("overlap-spread")
    cmd = [exe] if exe else [sys.executable, "-m", "overlap_spread.cli"]
    return subprocess.run(cmd + args, capture_output=True, text=True)


@pytest.fixture(scope="session")
def results(tmp_path_factory):
    """Every result-file kind, produced by the pipeline on bundled fixtures."""
    root = tmp_path_factory.mktemp("results")
    (root / "a.edges").write_text(EDGES_A)
    (root / "a.circles").write_text(CIRCLES_A)
    (root / "b.edges").write_text(EDGES_B)
    (root / "b.circles").write_text(CIRCLES_B)
    manifest = {
        "dataset": "demo",
        "networks": [
            {"id": "a", "edge_list": "a.edges", "circles": {"path": "a.circles", "format": "ego-circles"}},
            {"id": "b", "edge_list": "b.edges", "circles": {"path": "b.circles", "format": "ego-circles"}},
        ],
        "params": {"model": "cc", "uniform_edge_weight": 0.3, "l_max": 10},
        "seed": 5,
    }
    (root / "demo.json").write_text(json.dumps(manifest))
    out = root / "out"
    runs = [
        ["temporal", "--manifest", str(root / "demo.json"), "--metric", "out", "--out", str(out)],
        ["bootstrap", "--manifest", str(root / "demo.json"), "--metric", "out",
         "--t", "8", "--resamples", "300", "--out", str(out)],
        ["lorenz", "--manifest", str(root / "demo.json"), "--metric", "out",
         "--t", "8", "--out", str(out)],
        ["sweep", "--manifest", str(root / "demo.json"), "--kind", "circle-size",
         "--values", "1,4,6", "--out", str(out)],
        ["sweep", "--manifest", str(root / "demo.json"), "--kind", "edge-weight",
         "--values", "0.05,0.3,0.7", "--out", str(out / "ew")],
        ["stats", "--manifest", str(root / "demo.json"), "--out", str(out)],
    ]
    for args in runs:
        proc = spread_cli(args)
        assert proc.returncode == 0, proc.stderr
    return {
        "temporal": out / "temporal.csv",
        "bootstrap": out / "bootstrap.json",
        "lorenz": out / "lorenz.csv",
        "values": out / "values.csv",
        "shares": out / "shares.csv",
        "sweep": out / "sweep.csv",
        "sweep_ew": out / "ew" / "sweep.csv",
        "stats": out / "stats.csv",
    }
