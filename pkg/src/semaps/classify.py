"""Vector angle classification over embedded coordinates.

Each class has a seed direction; a point joins the class whose seed makes
the smallest angle with it, provided that angle is within the class
tightness bound.  Points whose norm falls below a threshold form a
separate "zero class" -- the class a diagonal barrier pushes its labels
into -- and the norm test runs first since angles are undefined at the
origin.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .embedding import Embedding

ZERO_CLASS = -2
UNCLASSIFIED = -3


@dataclass
class VacModel:
    seeds: np.ndarray            # s x n seed directions
    tightness: np.ndarray        # per-class angle bound in (0, pi]
    norm_threshold: float = 0.0
    class_names: list = field(default_factory=list)

    def __post_init__(self):
        self.seeds = np.atleast_2d(np.asarray(self.seeds, dtype=np.float64))
        self.tightness = np.asarray(self.tightness, dtype=np.float64)
        s = self.seeds.shape[0]
        if self.tightness.shape != (s,):
            raise ValueError("need one tightness bound per seed")
        if np.any(self.tightness <= 0) or np.any(self.tightness > np.pi):
            raise ValueError("tightness must lie in (0, pi]")
        norms = np.linalg.norm(self.seeds, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("seed directions must be nonzero")
        unit = self.seeds / norms[:, None]
        gram = unit @ unit.T
        np.fill_diagonal(gram, 0.0)
        if np.any(gram >= 1.0 - 1e-12):
            raise ValueError("seed directions must be pairwise non-parallel")
        if self.norm_threshold < 0:
            raise ValueError("norm threshold must be nonnegative")
        if not self.class_names:
            self.class_names = ["class%d" % i for i in range(s)]

    @property
    def n_classes(self):
        return self.seeds.shape[0]


def fit_seeds(emb: Embedding, groups: dict) -> VacModel:
    """Seed per class = mean of its member coordinates (tightness pi,
    threshold 0 until tuned)."""
    names, seeds = [], []
    for name in sorted(groups, key=str):
        idx = np.asarray(sorted(groups[name]), dtype=np.int64)
        if idx.size == 0:
            raise ValueError("class %r has no members" % (name,))
        if idx.min() < 0 or idx.max() >= emb.m:
            raise IndexError("class %r references an index out of range"
                             % (name,))
        seed = emb.coords[idx].mean(axis=0)
        if np.linalg.norm(seed) < 1e-300:
            raise ValueError("class %r has a degenerate (zero-mean) seed"
                             % (name,))
        names.append(str(name))
        seeds.append(seed)
    s = len(seeds)
    return VacModel(seeds=np.vstack(seeds), tightness=np.full(s, np.pi),
                    norm_threshold=0.0, class_names=names)


def vac_classify(emb: Embedding, model: VacModel) -> np.ndarray:
    """Label per point: a class id, ZERO_CLASS, or UNCLASSIFIED."""
    return classify_coords(emb.coords, model)


def classify_coords(coords, model: VacModel) -> np.ndarray:
    coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
    if coords.shape[1] != model.seeds.shape[1]:
        raise ValueError("embedding dimension %d does not match seeds (%d)"
                         % (coords.shape[1], model.seeds.shape[1]))
    angles = angles_to_seeds(coords, model.seeds)
    eligible = angles <= model.tightness[None, :]
    angles_masked = np.where(eligible, angles, np.inf)
    best = np.argmin(angles_masked, axis=1)  # ties -> lowest class index
    labels = np.where(np.isfinite(angles_masked[np.arange(len(coords)), best]),
                      best, UNCLASSIFIED).astype(np.int64)
    norms = np.linalg.norm(coords, axis=1)
    # exact zeros always land in the zero class: their angle is undefined
    labels[(norms < model.norm_threshold) | (norms == 0.0)] = ZERO_CLASS
    return labels


def angles_to_seeds(coords, seeds) -> np.ndarray:
    """Angle matrix (points x seeds); pi/2 for zero-norm points, which the
    threshold rule intercepts anyway."""
    norms = np.linalg.norm(coords, axis=1, keepdims=True)
    seed_norms = np.linalg.norm(seeds, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    cosv = (coords @ seeds.T) / (safe * seed_norms.T)
    cosv = np.where(norms == 0.0, 0.0, cosv)
    return np.arccos(np.clip(cosv, -1.0, 1.0))


def error_rate(predicted, truth, zero_class_to: int | None = None,
               unclassified_to: int | None = None) -> float:
    """Misclassified / total.  ZERO_CLASS (and UNCLASSIFIED) predictions
    are first mapped to a real class when the benchmark defines one;
    anything left unmapped counts as an error."""
    predicted = np.asarray(predicted, dtype=np.int64).copy()
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape:
        raise ValueError("predicted and truth lengths differ: %d vs %d"
                         % (predicted.size, truth.size))
    if zero_class_to is not None:
        predicted[predicted == ZERO_CLASS] = zero_class_to
    if unclassified_to is not None:
        predicted[predicted == UNCLASSIFIED] = unclassified_to
    return float(np.mean(predicted != truth))


def model_to_json(model: VacModel) -> str:
    return json.dumps({
        "seeds": [[float(v) for v in row] for row in model.seeds],
        "tightness": [float(v) for v in model.tightness],
        "norm_threshold": float(model.norm_threshold),
        "class_names": list(model.class_names),
    }, sort_keys=True, separators=(",", ":"))


def model_from_json(text: str) -> VacModel:
    d = json.loads(text)
    return VacModel(seeds=np.asarray(d["seeds"], dtype=np.float64),
                    tightness=np.asarray(d["tightness"], dtype=np.float64),
                    norm_threshold=float(d["norm_threshold"]),
                    class_names=list(d["class_names"]))
