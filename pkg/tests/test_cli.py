import json
import subprocess
import sys

import numpy as np


def run_cli(args, cwd=None):
    return subprocess.run([sys.executable, "-m", "semaps.cli", *args],
                          capture_output=True, text=True, cwd=cwd, timeout=300)


def test_bench_cli(tmp_path, data_dir):
    out = tmp_path / "table.csv"
    proc = run_cli(["bench", "--dataset", "chdd", "--train", "40",
                    "--reps", "3", "--seed", "5",
                    "--data-dir", str(data_dir), "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    assert "chdd" in proc.stdout
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("dataset,train")
    assert lines[1].startswith("chdd,40")


def test_embed_cli(tmp_path):
    rng = np.random.default_rng(0)
    csv = tmp_path / "cloud.csv"
    np.savetxt(csv, rng.standard_normal((40, 3)), delimiter=",")
    spec = tmp_path / "potential.json"
    spec.write_text(json.dumps([{"type": "diag", "indices": [0, 1],
                                 "value": 1.0}]))
    out = tmp_path / "emb.json"
    proc = run_cli(["embed", str(csv), "--k", "6", "--sigma", "4.0",
                    "--alpha", "2.0", "--n", "2",
                    "--potential", str(spec), "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    emb = json.loads(out.read_text())
    assert emb["shape"] == [40, 2]
    assert emb["params"]["alpha"] == 2.0


def test_arc_demo_cli(tmp_path):
    proc = run_cli(["arc-demo", "--out", str(tmp_path / "demo"),
                    "--m", "200", "--width", "10"])
    assert proc.returncode == 0, proc.stderr
    pts = np.loadtxt(tmp_path / "demo" / "arc-points.csv", delimiter=",")
    assert pts.shape == (200, 3)
    demo = json.loads((tmp_path / "demo" / "arc-demo.json").read_text())
    assert "plain" in demo["panels"]
    gaps = [demo["panels"]["pair_a%g" % a]["endpoint_gap"]
            for a in (0.01, 0.05, 0.1, 1.0)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
