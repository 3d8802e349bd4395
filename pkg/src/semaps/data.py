"""Dataset ingestion, cleaning, synthetic generators, train sampling.

Loaders read local delimited text only (UCI files ship in data/ or are
fetched by the user); nothing here touches the network.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

UNLABELED = -1


class ParseError(ValueError):
    def __init__(self, msg, row=None, col=None):
        loc = ""
        if row is not None:
            loc = " at row %s" % row
            if col is not None:
                loc += ", column %s" % col
        super().__init__(msg + loc)
        self.row = row
        self.col = col


@dataclass
class LabeledDataset:
    points: np.ndarray          # m x N feature matrix
    labels: np.ndarray          # class id per point, UNLABELED where unknown
    class_names: list
    source: str = ""
    n_dropped: int = 0          # rows removed for missing values

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.shape != (self.points.shape[0],):
            raise ValueError("labels length %d != point count %d"
                             % (self.labels.size, self.points.shape[0]))

    @property
    def m(self):
        return self.points.shape[0]

    @property
    def n_features(self):
        return self.points.shape[1]

    def indices_of(self, class_name: str) -> np.ndarray:
        cid = self.class_names.index(class_name)
        return np.flatnonzero(self.labels == cid)


@dataclass(frozen=True)
class TrainSplit:
    train_indices: np.ndarray
    seed: int

    def __post_init__(self):
        idx = np.asarray(self.train_indices, dtype=np.int64)
        if idx.size != np.unique(idx).size:
            raise ValueError("train indices must be unique")
        object.__setattr__(self, "train_indices", np.sort(idx))


DEFAULT_MISSING = ("?", "")


def load_csv(path, label_column: int = -1,
             missing_markers=DEFAULT_MISSING, *, drop_columns=(),
             drop_missing: bool = True, delimiter=None,
             header: str | bool = "auto") -> LabeledDataset:
    """Load a delimited numeric table with one label column.

    Rows containing a missing marker are dropped (count kept on the
    result) unless drop_missing=False, in which case markers parse to
    NaN for a later cleaning pass.  The label column may be non-numeric;
    distinct values become class names.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    text = path.read_text()
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in (line.split(",") if delimiter != "ws"
                                     and "," in line else line.split())]
        rows.append((lineno, cells))
    if not rows:
        raise ParseError("no data rows in %s" % path)

    drop_columns = sorted(set(int(c) for c in drop_columns))
    start = 0
    if header == "auto":
        start = 1 if _looks_like_header(rows[0][1], label_column,
                                        missing_markers) else 0
    elif header:
        start = 1
    body = rows[start:]
    if not body:
        raise ParseError("no data rows in %s" % path)

    width = len(body[0][1])
    label_idx = label_column if label_column >= 0 else width + label_column
    missing = set(missing_markers)

    feats, raw_labels, kept_rows, dropped = [], [], [], 0
    for lineno, cells in body:
        if len(cells) != width:
            raise ParseError("expected %d fields, got %d" % (width, len(cells)),
                             row=lineno)
        vals = []
        has_missing = False
        for ci, cell in enumerate(cells):
            if ci == label_idx or ci in drop_columns:
                continue
            if cell in missing:
                has_missing = True
                vals.append(np.nan)
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                raise ParseError("non-numeric value %r" % cell,
                                 row=lineno, col=ci) from None
        label_cell = cells[label_idx]
        if label_cell in missing:
            has_missing = True
            label_cell = None
        if has_missing and drop_missing:
            dropped += 1
            continue
        feats.append(vals)
        raw_labels.append(label_cell)
        kept_rows.append(lineno)

    if not feats:
        raise ParseError("all rows dropped while loading %s" % path)
    points = np.asarray(feats, dtype=np.float64)
    labels, class_names = _encode_labels(raw_labels)
    return LabeledDataset(points=points, labels=labels,
                          class_names=class_names,
                          source="%s (dropped %d rows with missing values)"
                                 % (path.name, dropped),
                          n_dropped=dropped)


def _looks_like_header(cells, label_column, missing_markers):
    width = len(cells)
    label_idx = label_column if label_column >= 0 else width + label_column
    for ci, cell in enumerate(cells):
        if ci == label_idx or cell in missing_markers:
            continue
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _encode_labels(raw):
    def key(v):
        try:
            return (0, float(v), "")
        except ValueError:
            return (1, 0.0, v)

    names = sorted(set(v for v in raw if v is not None), key=key)
    lut = {name: i for i, name in enumerate(names)}
    labels = np.asarray([UNLABELED if v is None else lut[v] for v in raw],
                        dtype=np.int64)
    return labels, list(names)


def mmd_clean(raw: LabeledDataset) -> LabeledDataset:
    """Clean the mammographic-mass table: drop incomplete rows, then drop
    the first attribute (a physician assessment score that would leak the
    outcome)."""
    if raw.m != 961 or raw.n_features != 5:
        raise ValueError("expected the raw 961 x 5 mammographic table, got "
                         "%d x %d" % (raw.m, raw.n_features))
    complete = np.all(np.isfinite(raw.points), axis=1)
    dropped = int(np.sum(~complete))
    points = raw.points[complete][:, 1:]
    return LabeledDataset(points=points, labels=raw.labels[complete],
                          class_names=list(raw.class_names),
                          source=raw.source + " | cleaned (dropped %d, "
                                 "removed assessment column)" % dropped,
                          n_dropped=dropped)


def standardize(points, *, enabled: bool = True):
    """Column-wise z-scoring (sample std, ddof=1).  Constant columns pass
    through unchanged."""
    x = np.asarray(points, dtype=np.float64)
    if not enabled:
        return x.copy()
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=1) if x.shape[0] > 1 else np.zeros(x.shape[1])
    out = x.copy()
    live = std > 0.0
    out[:, live] = (x[:, live] - mean[live]) / std[live]
    return out


def minmax_scale(points):
    """Column-wise rescale to [0, 1]; constant columns pass through."""
    x = np.asarray(points, dtype=np.float64)
    lo, hi = x.min(axis=0), x.max(axis=0)
    out = x.copy()
    live = hi > lo
    out[:, live] = (x[:, live] - lo[live]) / (hi[live] - lo[live])
    return out


def scale_points(points, mode: str):
    if mode == "zscore":
        return standardize(points)
    if mode == "minmax":
        return minmax_scale(points)
    if mode == "none":
        return np.asarray(points, dtype=np.float64).copy()
    raise ValueError("unknown scaling mode %r" % (mode,))


def make_arc(m: int, width: int, noise: float = 0.0, seed: int = 0,
             scale: float = 12.0):
    """3-D point cloud on an open cylindrical band sweeping 300 degrees.

    Points are ordered ring by ring along the sweep, so the first and
    last `width` indices are the two end rims.  Gaussian noise of the
    given scale is added when noise > 0.  `scale` multiplies the unit
    geometry; the default is sized so that unit-sigma heat weights give
    moderate degrees (the canonical demo fixture).
    """
    if width < 2 or m < width:
        raise ValueError("need m >= width >= 2, got m=%d, width=%d"
                         % (m, width))
    if m % width != 0:
        raise ValueError("m must be a multiple of width (got %d %% %d != 0)"
                         % (m, width))
    rings = m // width
    sweep = np.deg2rad(300.0)
    theta = np.linspace(0.0, sweep, rings)
    across = np.linspace(0.0, 1.0, width)
    pts = np.empty((m, 3))
    for r in range(rings):
        rows = slice(r * width, (r + 1) * width)
        pts[rows, 0] = np.cos(theta[r])
        pts[rows, 1] = np.sin(theta[r])
        pts[rows, 2] = across
    pts *= scale
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        pts = pts + noise * rng.standard_normal(pts.shape)
    return pts


def sample_train(dataset: LabeledDataset, count: int, seed: int) -> TrainSplit:
    """Uniform sample of training indices without replacement."""
    if count > dataset.m:
        raise ValueError("cannot sample %d of %d points" % (count, dataset.m))
    rng = np.random.default_rng(seed)
    idx = rng.choice(dataset.m, size=count, replace=False)
    return TrainSplit(train_indices=idx, seed=seed)


# --- manifest-driven loading (keeps the bench data-driven) ---

@dataclass
class DatasetSpec:
    name: str
    path: str
    label_column: int = -1
    missing: tuple = DEFAULT_MISSING
    drop_columns: tuple = ()
    clean: str | None = None          # named cleaning step, e.g. "mmd"
    binarize: dict | None = None      # {"positive": [...], "positive_name", "negative_name"}
    scaling: str = "zscore"           # zscore | minmax | none
    pushed_class: str | None = None   # class the diagonal potential acts on
    chain_class: str | None = None    # class identified via chain potential
    sigma: float = 1.0
    source: str = ""


def load_manifest(path) -> dict:
    path = Path(path)
    raw = json.loads(path.read_text())
    out = {}
    for name, entry in raw.items():
        entry = dict(entry)
        entry.setdefault("name", name)
        if "missing" in entry:
            entry["missing"] = tuple(entry["missing"])
        if "drop_columns" in entry:
            entry["drop_columns"] = tuple(entry["drop_columns"])
        out[name] = DatasetSpec(**entry)
    return out


def load_dataset(spec: DatasetSpec, base_dir=".") -> LabeledDataset:
    """Run the manifest entry's load -> clean -> binarize -> scale pipeline."""
    path = Path(base_dir) / spec.path
    ds = load_csv(path, label_column=spec.label_column,
                  missing_markers=spec.missing,
                  drop_columns=spec.drop_columns,
                  drop_missing=spec.clean is None)
    if spec.clean == "mmd":
        ds = mmd_clean(ds)
    elif spec.clean is not None:
        raise ValueError("unknown cleaning step %r" % (spec.clean,))
    if spec.binarize:
        ds = binarize_labels(ds, spec.binarize["positive"],
                             spec.binarize.get("positive_name", "positive"),
                             spec.binarize.get("negative_name", "negative"))
    pts = scale_points(ds.points, spec.scaling)
    return replace(ds, points=pts,
                   source=ds.source + " | scaling=" + spec.scaling)


def binarize_labels(ds: LabeledDataset, positive_names, positive_name,
                    negative_name) -> LabeledDataset:
    """Merge the named classes into one positive class, the rest into one
    negative class (negative gets id 0)."""
    positive_ids = {ds.class_names.index(str(n)) for n in positive_names}
    labels = np.asarray([1 if l in positive_ids else 0 for l in ds.labels],
                        dtype=np.int64)
    labels[ds.labels == UNLABELED] = UNLABELED
    return replace(ds, labels=labels,
                   class_names=[negative_name, positive_name])
