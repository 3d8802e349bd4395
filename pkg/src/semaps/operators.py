"""Graph Laplacian, barrier potentials, and their weighted sum.

The central object is E = L + alpha * V where L = D - W is the graph
Laplacian and V is a symmetric positive semi-definite "barrier" encoding
labels: a nonnegative diagonal pushes labeled points toward zero, a
pairwise barrier on (i, j) penalizes ||y_i - y_j||^2 and so identifies the
two points, and a chain strings consecutive pairwise barriers along an
index list.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .graph import SparseSym, WeightedGraph


@dataclass(frozen=True)
class DiagonalPotential:
    """Nonnegative weights on a set of node indices."""

    m: int
    indices: tuple
    values: tuple

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must pair up")
        if any(v < 0 for v in self.values):
            raise ValueError("diagonal potential entries must be nonnegative")
        _check_indices(self.indices, self.m)


@dataclass(frozen=True)
class PairwisePotential:
    """Sum of rank-one barriers, one per (i, j) pair; quadratic form
    sums ||y_i - y_j||^2 over the pairs."""

    m: int
    pairs: tuple

    def __post_init__(self):
        for i, j in self.pairs:
            if i == j:
                raise ValueError("pair (%d, %d) must join distinct nodes" % (i, j))
        _check_indices([i for p in self.pairs for i in p], self.m)


@dataclass(frozen=True)
class ChainPotential:
    """Consecutive pairwise barriers along an index list.

    Over indices (0, 1, ..., m-1) this is the classic second-difference
    matrix whose eigenvectors are the DCT-II basis.
    """

    m: int
    indices: tuple

    def __post_init__(self):
        if len(self.indices) < 2:
            raise ValueError("chain needs at least two indices")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("chain indices must be distinct")
        _check_indices(self.indices, self.m)


@dataclass(frozen=True)
class SumPotential:
    """Nonnegative combination of child potentials."""

    children: tuple  # of (coefficient, potential)

    def __post_init__(self):
        if not self.children:
            raise ValueError("empty sum")
        ms = {p.m for _, p in self.children}
        if len(ms) != 1:
            raise ValueError("children disagree on dimension: %s" % sorted(ms))
        if any(c < 0 for c, _ in self.children):
            raise ValueError("combination coefficients must be nonnegative")

    @property
    def m(self):
        return self.children[0][1].m


Potential = DiagonalPotential | PairwisePotential | ChainPotential | SumPotential


def diagonal_on(m, indices, value=1.0) -> DiagonalPotential:
    """Diagonal potential with a constant weight on the given indices."""
    idx = tuple(int(i) for i in indices)
    return DiagonalPotential(m=m, indices=idx, values=(float(value),) * len(idx))


def realize_potential(p: Potential) -> SparseSym:
    """Materialize the symbolic potential as an explicit symmetric matrix."""
    if isinstance(p, DiagonalPotential):
        idx = np.asarray(p.indices, dtype=np.int64)
        return SparseSym(p.m, idx, idx, np.asarray(p.values, dtype=np.float64))
    if isinstance(p, PairwisePotential):
        return _pairwise_matrix(p.m, p.pairs)
    if isinstance(p, ChainPotential):
        pairs = tuple(zip(p.indices[:-1], p.indices[1:]))
        return _pairwise_matrix(p.m, pairs)
    if isinstance(p, SumPotential):
        out = SparseSym.zeros(p.m)
        for coeff, child in p.children:
            out = out + realize_potential(child).scaled(coeff)
        return out
    raise TypeError("not a potential: %r" % (p,))


def _pairwise_matrix(m, pairs):
    rows, cols, vals = [], [], []
    for i, j in pairs:
        rows += [i, j, i]
        cols += [i, j, j]
        vals += [1.0, 1.0, -1.0]
    return SparseSym(m, rows, cols, vals)


def laplacian(graph: WeightedGraph) -> SparseSym:
    """L = D - W.  Symmetric PSD with zero row sums."""
    w = graph.weights
    neg = w.scaled(-1.0)
    idx = np.arange(graph.m)
    deg = SparseSym(graph.m, idx, idx, graph.degrees)
    return deg + neg


def schroedinger(lap: SparseSym, p: Potential, alpha: float) -> SparseSym:
    """E = L + alpha * V."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative, got %r" % (alpha,))
    if p.m != lap.m:
        raise ValueError("dimension mismatch: L is %d, potential is %d"
                         % (lap.m, p.m))
    if alpha == 0.0:
        return lap
    return lap + realize_potential(p).scaled(alpha)


def normalize(op: SparseSym, degrees) -> SparseSym:
    """Symmetric degree normalization D^{-1/2} A D^{-1/2}."""
    degrees = np.asarray(degrees, dtype=np.float64)
    if degrees.shape != (op.m,):
        raise ValueError("degree vector has wrong length")
    if np.any(degrees <= 0.0):
        raise ValueError("normalization requires strictly positive degrees")
    s = 1.0 / np.sqrt(degrees)
    vals = op.vals * s[op.rows] * s[op.cols]
    return SparseSym(op.m, op.rows, op.cols, vals)


def alpha_heuristic(m: int, n: int, s: float = 1.0, c: float = 1.0) -> float:
    """Data-size-driven starting value for the potential weight.

    sigma_m = 4 m^{-1/(n+2+s)} and alpha = m (pi sigma_m)^{(n+2)/2} / c,
    with n the intrinsic-dimension estimate.  Used only to center the
    alpha grid; c is a free constant.
    """
    if m < 1 or n < 1 or s <= 0 or c <= 0:
        raise ValueError("m, n must be >= 1 and s, c > 0")
    sigma_m = 4.0 * m ** (-1.0 / (n + 2 + s))
    return m * (np.pi * sigma_m) ** ((n + 2) / 2.0) / c


def potential_spec(p: Potential) -> list:
    """Serialize to the interchange form: a list of
    {type: diag|pair|chain, indices, value} items."""
    if isinstance(p, DiagonalPotential):
        return [{"type": "diag", "indices": list(p.indices),
                 "value": list(p.values)}]
    if isinstance(p, PairwisePotential):
        return [{"type": "pair", "indices": [list(q) for q in p.pairs],
                 "value": 1.0}]
    if isinstance(p, ChainPotential):
        return [{"type": "chain", "indices": list(p.indices), "value": 1.0}]
    if isinstance(p, SumPotential):
        out = []
        for coeff, child in p.children:
            items = potential_spec(child)
            for item in items:
                item = dict(item)
                if item["type"] == "diag":
                    item["value"] = [v * coeff for v in item["value"]]
                else:
                    item["value"] = item["value"] * coeff
                out.append(item)
        return out
    raise TypeError("not a potential: %r" % (p,))


def parse_potential_spec(spec, m: int) -> Potential:
    """Inverse of potential_spec; accepts any list of spec items."""
    if not isinstance(spec, (list, tuple)) or not spec:
        raise ValueError("potential spec must be a nonempty list")
    parts = []
    for item in spec:
        kind = item.get("type")
        idx = item.get("indices")
        value = item.get("value", 1.0)
        if kind == "diag":
            indices = tuple(int(i) for i in idx)
            if isinstance(value, (list, tuple)):
                values = tuple(float(v) for v in value)
            else:
                values = (float(value),) * len(indices)
            parts.append((1.0, DiagonalPotential(m, indices, values)))
        elif kind == "pair":
            pairs = tuple((int(a), int(b)) for a, b in idx)
            parts.append((float(value), PairwisePotential(m, pairs)))
        elif kind == "chain":
            parts.append((float(value),
                          ChainPotential(m, tuple(int(i) for i in idx))))
        else:
            raise ValueError("unknown potential type: %r" % (kind,))
    if len(parts) == 1 and parts[0][0] == 1.0:
        return parts[0][1]
    return SumPotential(tuple(parts))


def potential_hash(p: Potential) -> str:
    """Content hash of the symbolic form (cache key)."""
    blob = json.dumps(potential_spec(p), sort_keys=True,
                      separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _check_indices(indices, m):
    for i in indices:
        if not 0 <= i < m:
            raise IndexError("index %d out of range for dimension %d" % (i, m))
