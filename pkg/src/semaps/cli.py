"""Command-line entry points: benchmark tables, the arc demo, and the
HTTP service."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np


def main(argv=None):
    parser = argparse.ArgumentParser(prog="semaps",
                                     description="spectral embedding toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run the UCI benchmark protocol")
    b.add_argument("--dataset", required=True,
                   help="dataset id from the manifest (wbcd, chdd, mmd)")
    b.add_argument("--train", type=int, nargs="+", default=[40],
                   help="training sizes")
    b.add_argument("--reps", type=int, default=100)
    b.add_argument("--seed", type=int, default=7)
    b.add_argument("--out", default=None, help="write CSV here as well")
    b.add_argument("--data-dir", default="data")
    b.add_argument("--honest", action="store_true",
                   help="also emit the training-only grid selection")
    b.add_argument("--workers", type=int, default=1)
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("arc-demo", help="embed the arc fixture over an "
                                        "alpha sweep and dump the results")
    a.add_argument("--out", default="arc-demo",
                   help="output directory")
    a.add_argument("--m", type=int, default=400)
    a.add_argument("--width", type=int, default=10)
    a.add_argument("--noise", type=float, default=0.0)
    a.add_argument("--seed", type=int, default=7)
    a.set_defaults(func=cmd_arc_demo)

    e = sub.add_parser("embed", help="embed a point cloud from a CSV file")
    e.add_argument("csv", help="numeric CSV/whitespace table, one row per point")
    e.add_argument("--k", type=int, default=10)
    e.add_argument("--sigma", type=float, default=1.0)
    e.add_argument("--alpha", type=float, default=0.0)
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--potential", default=None,
                   help="JSON file with the potential spec list "
                        "(same format the service accepts)")
    e.add_argument("--out", default=None,
                   help="write the embedding JSON here (default stdout)")
    e.set_defaults(func=cmd_embed)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--port", type=int, default=8008)
    s.add_argument("--data-dir", default="service-data")
    s.add_argument("--point-cap", type=int, default=100_000)
    s.add_argument("--workers", type=int, default=2)
    s.add_argument("--cors-origin", default="*")
    s.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


def cmd_bench(args):
    from .bench import BenchConfig, emit_table, run_protocol

    config = BenchConfig(dataset=args.dataset,
                         train_sizes=tuple(args.train),
                         repetitions=args.reps, seed=args.seed,
                         honest=args.honest, data_dir=args.data_dir,
                         workers=args.workers)
    result = run_protocol(config)
    sys.stdout.write(emit_table(result, "text"))
    if args.honest:
        for cell in result.cells:
            if cell.honest:
                sys.stdout.write(
                    "honest grid (%s, %d): %.1f%% +-%.1f at %s\n"
                    % (cell.dataset, cell.train_size,
                       100 * cell.honest["mean_error"],
                       100 * cell.honest["std_error"],
                       {k: cell.honest[k] for k in ("k", "sigma", "alpha")}))
    if args.out:
        Path(args.out).write_text(emit_table(result, "csv"))
        print("wrote", args.out)
    return 0


def cmd_arc_demo(args):
    from .data import make_arc
    from .graph import build_graph
    from .embedding import embed_graph
    from .operators import PairwisePotential, diagonal_on

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pts = make_arc(args.m, args.width, noise=args.noise, seed=args.seed)
    np.savetxt(out / "arc-points.csv", pts, delimiter=",", fmt="%.17g")
    graph = build_graph(pts, 10, 1.0)

    m = args.m
    mid = m // 2
    demo = {"m": m, "width": args.width, "noise": args.noise,
            "seed": args.seed, "k": 10, "sigma": 1.0, "panels": {}}

    emb = embed_graph(graph, None, 0.0, n=2)
    demo["panels"]["plain"] = {"alpha": 0.0,
                               "coords": emb.coords.ravel().tolist()}

    diag = diagonal_on(m, [mid])
    for alpha in (0.05, 0.1, 0.5, 5.0):
        emb = embed_graph(graph, diag, alpha, n=2)
        demo["panels"]["diag_a%g" % alpha] = {
            "alpha": alpha,
            "pushed_norm": float(np.linalg.norm(emb.coords[mid])),
            "coords": emb.coords.ravel().tolist()}

    pair = PairwisePotential(m, ((0, m - 1),))
    for alpha in (0.01, 0.05, 0.1, 1.0):
        emb = embed_graph(graph, pair, alpha, n=2)
        gap = float(np.linalg.norm(emb.coords[0] - emb.coords[-1]))
        demo["panels"]["pair_a%g" % alpha] = {
            "alpha": alpha, "endpoint_gap": gap,
            "coords": emb.coords.ravel().tolist()}

    (out / "arc-demo.json").write_text(json.dumps(demo))
    print("wrote", out / "arc-points.csv", "and", out / "arc-demo.json")
    return 0


def cmd_embed(args):
    from .embedding import embed_graph, to_json
    from .graph import build_graph
    from .operators import parse_potential_spec

    pts = np.loadtxt(args.csv, delimiter="," if
                     "," in Path(args.csv).read_text()[:1000] else None,
                     ndmin=2)
    potential = None
    if args.potential:
        spec = json.loads(Path(args.potential).read_text())
        potential = parse_potential_spec(spec, pts.shape[0])
    graph = build_graph(pts, args.k, args.sigma)
    emb = embed_graph(graph, potential, args.alpha, args.n)
    text = to_json(emb)
    if args.out:
        Path(args.out).write_text(text)
        print("wrote", args.out)
    else:
        print(text)
    return 0


def cmd_serve(args):
    from .service import serve

    server, _ = serve(port=args.port, data_dir=args.data_dir,
                      point_cap=args.point_cap, workers=args.workers,
                      cors_origin=args.cors_origin)
    host, port = server.server_address[:2]
    print("serving on http://%s:%d (data dir: %s)" % (host, port,
                                                      args.data_dir))
    sys.stdout.flush()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
