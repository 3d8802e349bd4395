"""k-nearest-neighbor graphs with heat-kernel edge weights.

Nodes i and j are connected when x_i is among the k nearest neighbors of
x_j or vice versa (union symmetrization, Euclidean metric).  Edge weights
are exp(-||x_i - x_j||^2 / sigma).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


class SparseSym:
    """Symmetric sparse matrix stored as its upper triangle.

    Only entries with i <= j are kept, so W == W.T holds structurally and
    cannot drift through arithmetic.  Duplicate (i, j) entries are summed
    at construction.
    """

    __slots__ = ("m", "rows", "cols", "vals")

    def __init__(self, m, rows, cols, vals):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("rows, cols, vals must have equal length")
        if rows.size and (rows.min() < 0 or cols.min() < 0 or
                          max(rows.max(), cols.max()) >= m):
            raise IndexError("index out of range for dimension %d" % m)
        if not np.all(np.isfinite(vals)):
            raise ValueError("matrix entries must be finite")
        # canonicalize to upper triangle and merge duplicates
        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        key = lo * m + hi
        order = np.argsort(key, kind="stable")
        key, lo, hi, vals = key[order], lo[order], hi[order], vals[order]
        if key.size:
            uniq, start = np.unique(key, return_index=True)
            summed = np.add.reduceat(vals, start)
            lo, hi, vals = lo[start], hi[start], summed
        keep = vals != 0.0
        self.m = int(m)
        self.rows = lo[keep]
        self.cols = hi[keep]
        self.vals = vals[keep]

    @classmethod
    def zeros(cls, m):
        return cls(m, [], [], [])

    @classmethod
    def from_dense(cls, a, tol=0.0):
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("need a square matrix")
        if np.abs(a - a.T).max(initial=0.0) > tol:
            raise ValueError("matrix is not symmetric")
        iu, ju = np.triu_indices(a.shape[0])
        v = a[iu, ju]
        keep = v != 0.0
        return cls(a.shape[0], iu[keep], ju[keep], v[keep])

    @property
    def nnz(self):
        return self.vals.size

    def to_csr(self) -> sp.csr_matrix:
        """Full (mirrored) scipy CSR view."""
        off = self.rows != self.cols
        r = np.concatenate([self.rows, self.cols[off]])
        c = np.concatenate([self.cols, self.rows[off]])
        v = np.concatenate([self.vals, self.vals[off]])
        return sp.csr_matrix((v, (r, c)), shape=(self.m, self.m))

    def dense(self):
        out = np.zeros((self.m, self.m))
        out[self.rows, self.cols] = self.vals
        off = self.rows != self.cols
        out[self.cols[off], self.rows[off]] = self.vals[off]
        return out

    def matvec(self, x):
        x = np.asarray(x, dtype=np.float64)
        ax = np.zeros_like(x)
        v = self.vals
        if x.ndim == 1:
            np.add.at(ax, self.rows, v * x[self.cols])
            off = self.rows != self.cols
            np.add.at(ax, self.cols[off], v[off] * x[self.rows[off]])
        else:
            np.add.at(ax, self.rows, v[:, None] * x[self.cols])
            off = self.rows != self.cols
            np.add.at(ax, self.cols[off], v[off, None] * x[self.rows[off]])
        return ax

    def diagonal(self):
        d = np.zeros(self.m)
        on = self.rows == self.cols
        d[self.rows[on]] = self.vals[on]
        return d

    def scaled(self, c: float) -> "SparseSym":
        return SparseSym(self.m, self.rows, self.cols, self.vals * c)

    def add(self, other: "SparseSym") -> "SparseSym":
        if other.m != self.m:
            raise ValueError("dimension mismatch: %d vs %d" % (self.m, other.m))
        return SparseSym(
            self.m,
            np.concatenate([self.rows, other.rows]),
            np.concatenate([self.cols, other.cols]),
            np.concatenate([self.vals, other.vals]),
        )

    def __add__(self, other):
        return self.add(other)

    def quad_form(self, y):
        """trace(y^T A y) for column block y."""
        y = np.atleast_2d(np.asarray(y, dtype=np.float64))
        if y.shape[0] != self.m:
            y = y.T
        return float(np.sum(y * self.matvec(y)))


@dataclass(frozen=True)
class WeightedGraph:
    """Heat-kernel weighted kNN graph with precomputed degrees."""

    m: int
    weights: SparseSym
    degrees: np.ndarray
    k: int
    sigma: float

    def __post_init__(self):
        if np.any(self.weights.diagonal() != 0.0):
            raise ValueError("weight matrix must have zero diagonal")


def knn_graph(points, k: int):
    """Symmetrized k-nearest-neighbor edge set.

    Returns edges as an (n_edges, 2) int array with i < j in each row,
    sorted lexicographically.  Ties at the k-th distance are broken by
    lower index, so the result is deterministic.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("points must be an (m, N) array")
    m = x.shape[0]
    if not 1 <= k < m:
        raise ValueError("k must satisfy 1 <= k < m, got k=%d, m=%d" % (k, m))
    sq = np.einsum("ij,ij->i", x, x)
    nbr = np.empty((m, k), dtype=np.int64)
    block = max(1, min(m, 2 ** 22 // max(m, 1)))  # cap scratch at ~32 MB
    for start in range(0, m, block):
        stop = min(start + block, m)
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * (x[start:stop] @ x.T)
        np.maximum(d2, 0.0, out=d2)
        d2[np.arange(start, stop) - start, np.arange(start, stop)] = np.inf
        # stable sort on distance keeps column (= index) order within ties,
        # which is the (distance, index) rule
        nbr[start:stop] = np.argsort(d2, axis=1, kind="stable")[:, :k]
    src = np.repeat(np.arange(m), k)
    dst = nbr.ravel()
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    edges = np.unique(np.stack([lo, hi], axis=1), axis=0)
    return edges


def heat_weights(edges, points, sigma: float, k: int = 0) -> WeightedGraph:
    """Weight an edge set with the heat kernel exp(-d^2 / sigma).

    `k` is carried as provenance only; pass the value used to build the
    edge set when known.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive, got %r" % (sigma,))
    x = np.asarray(points, dtype=np.float64)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    m = x.shape[0]
    diff = x[edges[:, 0]] - x[edges[:, 1]]
    d2 = np.einsum("ij,ij->i", diff, diff)
    w = np.exp(-d2 / sigma)
    # exp underflows to 0 past ~745 sigma-units; keep edges strictly positive
    w = np.maximum(w, np.finfo(np.float64).tiny)
    weights = SparseSym(m, edges[:, 0], edges[:, 1], w)
    degrees = weights.matvec(np.ones(m))
    if np.any(degrees <= 0.0):
        isolated = np.flatnonzero(degrees <= 0.0)
        raise ValueError("graph has isolated nodes: %s" % isolated[:10])
    return WeightedGraph(m=m, weights=weights, degrees=degrees, k=int(k),
                         sigma=float(sigma))


def build_graph(points, k: int, sigma: float) -> WeightedGraph:
    """knn_graph + heat_weights in one call."""
    return heat_weights(knn_graph(points, k), points, sigma, k=k)


def connected_components(graph: WeightedGraph):
    """Component id per node and the number of components."""
    return component_labels(graph.weights)


def component_labels(weights: SparseSym):
    m = weights.m
    labels = np.full(m, -1, dtype=np.int64)
    adj = weights.to_csr()
    indptr, indices = adj.indptr, adj.indices
    count = 0
    for seed in range(m):
        if labels[seed] >= 0:
            continue
        stack = [seed]
        labels[seed] = count
        while stack:
            u = stack.pop()
            for v in indices[indptr[u]:indptr[u + 1]]:
                if labels[v] < 0:
                    labels[v] = count
                    stack.append(v)
        count += 1
    return labels, count


def dump_edges(graph: WeightedGraph, fh):
    """Write 'i j weight' lines (debugging aid and UI overlay feed)."""
    w = graph.weights
    for i, j, v in zip(w.rows, w.cols, w.vals):
        fh.write("%d %d %.17g\n" % (i, j, v))
