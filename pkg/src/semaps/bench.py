"""UCI benchmark harness: randomized training splits, potential-steered
embeddings of the full dataset, angle/threshold classification, and error
rates averaged over repetitions with grid-searched parameters.

Protocol per repetition: sample training indices; build the
dataset-specific potential (diagonal barrier on the class to be pushed
toward zero, plus a chain identifying the opposite class where
configured); embed the entire dataset; classify; score against all
labels.  Parameters (k, sigma, alpha, threshold) minimize the mean error
across repetitions, mirroring the published protocol; an honest variant
that selects on training error only is emitted alongside when asked.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import ZERO_CLASS, VacModel, classify_coords
from .data import DatasetSpec, LabeledDataset, load_dataset, load_manifest
from .embedding import DisconnectedGraphError, embed_graph
from .graph import WeightedGraph, build_graph, connected_components
from .operators import (ChainPotential, DiagonalPotential, SumPotential,
                        alpha_heuristic)

# reference error rates published for these benchmarks; SVM columns are
# external baselines quoted for context, not reproduced by this package
PUBLISHED = {
    ("wbcd", 40): {"le": 0.14, "svm_lin": 0.05, "svm_gauss": 0.05, "se": 0.04},
    ("wbcd", 100): {"le": 0.09, "svm_lin": 0.04, "svm_gauss": 0.04, "se": 0.03},
    ("wbcd", 200): {"le": None, "svm_lin": 0.04, "svm_gauss": 0.03, "se": 0.03},
    ("wbcd", 400): {"le": None, "svm_lin": 0.04, "svm_gauss": 0.02, "se": 0.03},
    ("wbcd", 600): {"le": None, "svm_lin": 0.04, "svm_gauss": 0.02, "se": 0.03},
    ("chdd", 40): {"le": 0.42, "svm_lin": 0.21, "svm_gauss": 0.19, "se": 0.15},
    ("chdd", 100): {"le": None, "svm_lin": 0.17, "svm_gauss": 0.15, "se": 0.12},
    ("chdd", 200): {"le": None, "svm_lin": 0.16, "svm_gauss": 0.11, "se": 0.12},
    ("chdd", 297): {"le": None, "svm_lin": 0.15, "svm_gauss": 0.09, "se": 0.11},
    ("mmd", 20): {"le": 0.45, "svm_lin": 0.24, "svm_gauss": 0.24, "se": 0.22},
    ("mmd", 30): {"le": 0.40, "svm_lin": 0.22, "svm_gauss": 0.22, "se": 0.21},
    ("mmd", 40): {"le": 0.38, "svm_lin": 0.22, "svm_gauss": 0.21, "se": 0.20},
    ("mmd", 100): {"le": None, "svm_lin": 0.21, "svm_gauss": 0.20, "se": 0.20},
    ("mmd", 200): {"le": None, "svm_lin": 0.20, "svm_gauss": 0.19, "se": 0.20},
    ("mmd", 800): {"le": None, "svm_lin": 0.20, "svm_gauss": 0.18, "se": 0.20},
}

# grid defaults found by running the protocol's own optimization offline
# over k in [6, 20], sigma around the published per-dataset values, and a
# wide alpha range; kept small so the full 100-rep table stays fast
DEFAULT_GRIDS = {
    "wbcd": {"k": (10, 14), "sigma": (0.5,), "alpha": (1.0, 10.0, 100.0)},
    "chdd": {"k": (8, 12, 16, 20), "sigma": (1.0,), "alpha": (1.0, 2.0, 3.0, 5.0)},
    "mmd": {"k": (14, 20), "sigma": (1.0, 2.0), "alpha": (0.1, 0.3, 1.0)},
}

N_COMPONENTS = 6  # eigenvectors kept throughout the published protocol


@dataclass
class BenchConfig:
    dataset: str
    train_sizes: tuple = (40,)
    repetitions: int = 100
    k_grid: tuple | None = None       # None -> per-dataset default
    sigma_grid: tuple | None = None
    alpha_grid: tuple | None = None   # None -> default; "heuristic" -> centered recipe
    n_components: int = N_COMPONENTS
    seed: int = 7
    methods: tuple = ("se", "le")
    honest: bool = False
    data_dir: str = "data"
    manifest: str = "manifest.json"
    workers: int = 1


@dataclass
class CellResult:
    dataset: str
    train_size: int
    method: str
    mean_error: float
    std_error: float
    best: dict
    per_rep_errors: np.ndarray
    honest: dict | None = None
    failures: list = field(default_factory=list)

    @property
    def published(self):
        ref = PUBLISHED.get((self.dataset, self.train_size))
        return None if ref is None else ref.get(self.method)


@dataclass
class BenchResult:
    cells: list
    config: BenchConfig
    elapsed_seconds: float

    def cell(self, dataset, train_size, method) -> CellResult:
        for c in self.cells:
            if (c.dataset, c.train_size, c.method) == (dataset, train_size,
                                                       method):
                return c
        raise KeyError((dataset, train_size, method))


def resolve_grids(config: BenchConfig, m: int):
    defaults = DEFAULT_GRIDS.get(config.dataset, {})
    ks = config.k_grid or defaults.get("k", (6, 10, 14, 20))
    sigmas = config.sigma_grid or defaults.get("sigma", (0.5, 1.0, 2.0))
    alphas = config.alpha_grid
    if alphas == "heuristic" or (alphas is None and "alpha" not in defaults):
        center = alpha_heuristic(m, 2)
        alphas = tuple(center * 10.0 ** e for e in np.linspace(-3.5, 3.5, 8))
    elif alphas is None:
        alphas = defaults["alpha"]
    return tuple(ks), tuple(sigmas), tuple(alphas)


def rep_seeds(master_seed: int, train_size: int, reps: int):
    ss = np.random.SeedSequence((master_seed, train_size))
    return [int(c.generate_state(1)[0] % 2 ** 31) for c in ss.spawn(reps)]


def build_potential(ds: LabeledDataset, spec: DatasetSpec, train_indices):
    """Diagonal barrier on the pushed class; chain identification on the
    configured class (both restricted to training points)."""
    pushed = ds.class_names.index(spec.pushed_class)
    diag_idx = [int(i) for i in train_indices if ds.labels[i] == pushed]
    parts = [(1.0, DiagonalPotential(ds.m, tuple(diag_idx),
                                     (1.0,) * len(diag_idx)))]
    if spec.chain_class is not None:
        cid = ds.class_names.index(spec.chain_class)
        chain_idx = [int(i) for i in train_indices if ds.labels[i] == cid]
        if len(chain_idx) >= 2:
            parts.append((1.0, ChainPotential(ds.m, tuple(chain_idx))))
    return parts[0][1] if len(parts) == 1 else SumPotential(tuple(parts))


def _class_mean_seeds(coords, labels, train_indices, class_ids):
    seeds, names = [], []
    for c in class_ids:
        idx = [int(i) for i in train_indices if labels[i] == c]
        if idx:
            v = coords[idx].mean(axis=0)
            if np.linalg.norm(v) > 1e-300:
                seeds.append(v)
                names.append(c)
    return (np.vstack(seeds), np.asarray(names)) if seeds else (None, None)


def _angle_predictions(coords, seeds, seed_classes, fallback):
    if seeds is None:
        return np.full(coords.shape[0], fallback, dtype=np.int64)
    model = VacModel(seeds=seeds, tightness=np.full(len(seeds), np.pi))
    lab = classify_coords(coords, model)
    out = np.where(lab >= 0, seed_classes[np.minimum(lab, len(seed_classes) - 1)],
                   fallback)
    # exact zero-norm points carry no direction; send them to the fallback
    out[lab == ZERO_CLASS] = fallback
    return out.astype(np.int64)


def se_threshold_curves(emb_coords, ds, spec, train_indices):
    """Classification error as a function of the norm threshold, for both
    above-threshold rules, at every realizable cut point.

    Below the threshold a point goes to the pushed class.  Above it, the
    "hybrid" rule picks the angle-nearest training-class seed over all
    classes, while the "complement" rule uses only the non-pushed seeds
    (for two classes: everything above goes to the other class).  The
    hybrid wins when the pushed seed direction stays informative at small
    alpha; the complement is robust once the barrier has collapsed the
    pushed training points.  Returns a list of (full_errors,
    train_errors) pairs over the cuts; entry 0 pushes nothing.
    """
    labels = ds.labels
    pushed = ds.class_names.index(spec.pushed_class)
    other_ids = [c for c in range(len(ds.class_names)) if c != pushed]
    fallback = other_ids[0] if other_ids else pushed
    norms = np.linalg.norm(emb_coords, axis=1)
    assignments = []
    seeds, seed_classes = _class_mean_seeds(emb_coords, labels, train_indices,
                                            range(len(ds.class_names)))
    assignments.append(_angle_predictions(emb_coords, seeds, seed_classes,
                                          fallback=fallback))
    seeds_o, classes_o = _class_mean_seeds(emb_coords, labels, train_indices,
                                           other_ids)
    assignments.append(_angle_predictions(emb_coords, seeds_o, classes_o,
                                          fallback=fallback))

    order = np.argsort(norms, kind="stable")
    wrong_pushed = (labels[order] != pushed).astype(np.int64)
    train_mask = np.zeros(ds.m, bool)
    train_mask[np.asarray(train_indices, dtype=np.int64)] = True
    tm = train_mask[order]
    below = np.concatenate([[0], np.cumsum(wrong_pushed)])
    below_t = np.concatenate([[0], np.cumsum(wrong_pushed * tm)])
    sorted_norms = norms[order]
    # identical norms cannot be split: only cuts at value boundaries are
    # realizable thresholds
    boundary = np.concatenate([[True],
                               sorted_norms[1:] != sorted_norms[:-1],
                               [True]])
    out = []
    for ang in assignments:
        wrong_angle = (ang[order] != labels[order]).astype(np.int64)
        cum = np.concatenate([[0], np.cumsum(wrong_angle)])
        full = (below + (cum[-1] - cum)) / ds.m
        cum_t = np.concatenate([[0], np.cumsum(wrong_angle * tm)])
        train = (below_t + (cum_t[-1] - cum_t)) / max(1, len(train_indices))
        out.append((full[boundary], train[boundary]))
    return out


def le_rep_error(emb_coords, ds, train_indices):
    """Baseline: angle classification from training-class mean seeds;
    training points count as correct by construction."""
    labels = ds.labels
    seeds, seed_classes = _class_mean_seeds(emb_coords, labels, train_indices,
                                            range(len(ds.class_names)))
    pred = _angle_predictions(emb_coords, seeds, seed_classes, fallback=-9)
    pred[np.asarray(train_indices, dtype=np.int64)] = \
        labels[np.asarray(train_indices, dtype=np.int64)]
    return float(np.mean(pred != labels))


def run_protocol(config: BenchConfig) -> BenchResult:
    t0 = time.perf_counter()
    manifest = load_manifest(Path(config.data_dir) / config.manifest)
    spec = manifest[config.dataset]
    ds = load_dataset(spec, base_dir=config.data_dir)
    ks, sigmas, alphas = resolve_grids(config, ds.m)

    graphs, failures = {}, []
    for k in ks:
        for sig in sigmas:
            try:
                g = build_graph(ds.points, k, sig)
                _, ncomp = connected_components(g)
                if ncomp != 1:
                    raise DisconnectedGraphError("%d components" % ncomp)
                graphs[(k, sig)] = g
            except (ValueError, DisconnectedGraphError) as exc:
                failures.append({"k": k, "sigma": sig, "error": str(exc)})
    if not graphs:
        raise RuntimeError("no usable (k, sigma) grid point: %s" % failures)

    cells = []
    for size in config.train_sizes:
        seeds_per_rep = rep_seeds(config.seed, size, config.repetitions)
        splits = []
        for s in seeds_per_rep:
            rng = np.random.default_rng(s)
            splits.append(np.sort(rng.choice(ds.m, size=size, replace=False)))
        se_cell = None
        if "se" in config.methods:
            se_cell = _run_se_cell(config, spec, ds, graphs, alphas,
                                   size, splits, failures)
            cells.append(se_cell)
        if "le" in config.methods:
            # the baseline runs with the same graph parameters the steered
            # method selected, when available
            pin = None
            if se_cell is not None:
                pin = (se_cell.best["k"], se_cell.best["sigma"])
            cells.append(_run_le_cell(config, spec, ds, graphs, size, splits,
                                      failures, pin=pin))
    return BenchResult(cells=cells, config=config,
                       elapsed_seconds=time.perf_counter() - t0)


def _run_se_cell(config, spec, ds, graphs, alphas, size, splits,
                 graph_failures) -> CellResult:
    keys = sorted(graphs)
    reps = len(splits)
    # full-data error optimized over threshold per repetition, and the
    # training-only counterpart for the honest variant
    err = np.full((reps, len(keys), len(alphas)), np.nan)
    err_honest = np.full_like(err, np.nan) if config.honest else None
    failures = list(graph_failures)

    def one_rep(rep):
        train = splits[rep]
        pot = build_potential(ds, spec, train)
        for ig, key in enumerate(keys):
            g = graphs[key]
            for ia, alpha in enumerate(alphas):
                try:
                    emb = embed_graph(g, pot, alpha, n=config.n_components,
                                      seed=config.seed)
                except (ValueError, DisconnectedGraphError) as exc:
                    failures.append({"rep": rep, "k": key[0], "sigma": key[1],
                                     "alpha": alpha, "error": str(exc)})
                    continue
                curves = se_threshold_curves(emb.coords, ds, spec, train)
                err[rep, ig, ia] = min(full.min() for full, _ in curves)
                if err_honest is not None:
                    picks = [(tr.min(), full[int(np.argmin(tr))])
                             for full, tr in curves]
                    err_honest[rep, ig, ia] = min(picks)[1]

    _map_reps(one_rep, reps, config.workers)

    mean = np.nanmean(err, axis=0)
    flat_best = int(np.nanargmin(mean))
    ig, ia = np.unravel_index(flat_best, mean.shape)
    best = {"k": keys[ig][0], "sigma": keys[ig][1], "alpha": alphas[ia],
            "threshold": "per-repetition quantile sweep"}
    per_rep = err[:, ig, ia]
    honest = None
    if err_honest is not None:
        hmean = np.nanmean(err_honest, axis=0)
        hig, hia = np.unravel_index(int(np.nanargmin(hmean)), hmean.shape)
        honest = {"mean_error": float(hmean[hig, hia]),
                  "std_error": float(np.nanstd(err_honest[:, hig, hia])),
                  "k": keys[hig][0], "sigma": keys[hig][1],
                  "alpha": alphas[hia],
                  "threshold": "chosen on training error per repetition"}
    return CellResult(dataset=config.dataset, train_size=size, method="se",
                      mean_error=float(np.nanmean(per_rep)),
                      std_error=float(np.nanstd(per_rep)),
                      best=best, per_rep_errors=per_rep, honest=honest,
                      failures=failures)


def _run_le_cell(config, spec, ds, graphs, size, splits,
                 graph_failures, pin=None) -> CellResult:
    keys = [pin] if pin in graphs else sorted(graphs)
    reps = len(splits)
    embeddings = {}
    failures = list(graph_failures)
    for key in keys:
        try:
            embeddings[key] = embed_graph(graphs[key], None, 0.0,
                                          n=config.n_components,
                                          seed=config.seed)
        except (ValueError, DisconnectedGraphError) as exc:
            failures.append({"k": key[0], "sigma": key[1], "error": str(exc)})
    err = np.full((reps, len(keys)), np.nan)

    def one_rep(rep):
        for ig, key in enumerate(keys):
            if key in embeddings:
                err[rep, ig] = le_rep_error(embeddings[key].coords, ds,
                                            splits[rep])

    _map_reps(one_rep, reps, config.workers)
    mean = np.nanmean(err, axis=0)
    ig = int(np.nanargmin(mean))
    per_rep = err[:, ig]
    return CellResult(dataset=config.dataset, train_size=size, method="le",
                      mean_error=float(np.nanmean(per_rep)),
                      std_error=float(np.nanstd(per_rep)),
                      best={"k": keys[ig][0], "sigma": keys[ig][1]},
                      per_rep_errors=per_rep, failures=failures)


def _map_reps(fn, reps, workers):
    if workers <= 1:
        for rep in range(reps):
            fn(rep)
    else:
        # results land in preallocated arrays indexed by rep, so the
        # reduction is deterministic regardless of completion order
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fn, range(reps)))


def emit_table(result: BenchResult, fmt: str = "text") -> str:
    """Tabulate mean errors next to the published reference numbers."""
    rows = {}
    for c in result.cells:
        rows.setdefault((c.dataset, c.train_size), {})[c.method] = c
    header = ["dataset", "train", "LE", "LE(pub)", "SVMlin(pub)",
              "SVMgauss(pub)", "SE", "SE(pub)"]
    table = [header]
    for (dsname, size) in sorted(rows):
        cell = rows[(dsname, size)]
        pub = PUBLISHED.get((dsname, size), {})
        table.append([
            dsname, str(size),
            _fmt_err(cell.get("le")), _fmt_pub(pub.get("le")),
            _fmt_pub(pub.get("svm_lin")), _fmt_pub(pub.get("svm_gauss")),
            _fmt_err(cell.get("se")), _fmt_pub(pub.get("se")),
        ])
    if fmt == "csv":
        return "\n".join(",".join(row) for row in table) + "\n"
    if fmt != "text":
        raise ValueError("format must be 'text' or 'csv'")
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip()
             for row in table]
    lines.append("(pub) columns quote published reference values; the SVM "
                 "baselines are external and not reproduced here.")
    return "\n".join(lines) + "\n"


def _fmt_err(cell):
    if cell is None:
        return "-"
    return "%.1f%% +-%.1f" % (100 * cell.mean_error, 100 * cell.std_error)


def _fmt_pub(v):
    return "-" if v is None else "%.0f%%" % (100 * v)
