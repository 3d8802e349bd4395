"""Regenerate the frontend test fixtures from the canonical arc demo.

The UI integration test replays the same alpha sweep through the HTTP
service and must land on these exact numbers (the service is the single
numeric source).  Run from the repository root:

    python scripts/make_frontend_fixtures.py
"""

import json
from pathlib import Path

import numpy as np

import semaps as sm

OUT = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"

ARC = {"m": 400, "width": 10, "noise": 0.0, "seed": 7}
K, SIGMA, N = 10, 1.0, 2
SWEEP = (0.01, 0.05, 0.1, 1.0)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    pts = sm.make_arc(ARC["m"], ARC["width"], noise=ARC["noise"],
                      seed=ARC["seed"])
    (OUT / "arc-points.json").write_text(json.dumps(
        {"shape": [ARC["m"], 3], "points": [float(v) for v in pts.ravel()],
         **ARC}))

    graph = sm.build_graph(pts, K, SIGMA)
    pot = sm.PairwisePotential(ARC["m"], ((0, ARC["m"] - 1),))
    gaps = []
    last = None
    for alpha in SWEEP:
        emb = sm.embed_graph(graph, pot, alpha, n=N)
        gaps.append(float(np.linalg.norm(emb.coords[0] - emb.coords[-1])))
        last = emb
    diam = 0.0
    for i in range(ARC["m"]):
        diff = last.coords - last.coords[i]
        diam = max(diam, float(np.sqrt((diff ** 2).sum(axis=1).max())))
    expected = {
        "params": {"k": K, "sigma": SIGMA, "n": N},
        "pair": [0, ARC["m"] - 1],
        "alphas": list(SWEEP),
        "endpoint_gaps": gaps,
        "final_gap_over_diameter": gaps[-1] / diam,
    }
    (OUT / "arc-sweep-expected.json").write_text(json.dumps(expected))
    print("wrote", OUT / "arc-points.json")
    print("wrote", OUT / "arc-sweep-expected.json")
    print("gaps:", gaps, "final ratio:", gaps[-1] / diam)


if __name__ == "__main__":
    main()
