"""Spectral embedding pipelines.

Both pipelines minimize trace(y^T (L + alpha V) y) subject to y^T D y = I
via the degree-normalized operator D^{-1/2} (L + alpha V) D^{-1/2}: solve
for the smallest eigenvectors z, discard the leading one (the uniform
skip-one rule, so the alpha -> 0 limit is continuous), and map back
through y = D^{-1/2} z.  Laplacian eigenmaps is the alpha = 0 special
case.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .eigensolve import smallest_eigs
from .graph import WeightedGraph, build_graph, connected_components
from .operators import (Potential, laplacian, normalize, potential_hash,
                        realize_potential, schroedinger)

CLUSTER_GAP = 1e-10
FORMAT_VERSION = 1


class DisconnectedGraphError(ValueError):
    pass


@dataclass
class Embedding:
    coords: np.ndarray        # m x n, rows are embedded points
    eigenvalues: np.ndarray   # the n retained eigenvalues, ascending
    skipped_vector: np.ndarray
    skipped_value: float
    degrees: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.coords.shape[0]

    @property
    def n(self):
        return self.coords.shape[1]


def laplacian_eigenmaps(points, k: int, sigma: float, n: int,
                        **solver_kw) -> Embedding:
    """Plain spectral embedding of a point cloud."""
    graph = build_graph(points, k, sigma)
    return embed_graph(graph, potential=None, alpha=0.0, n=n, **solver_kw)


def schroedinger_eigenmaps(points, potential: Potential, alpha: float,
                           k: int, sigma: float, n: int,
                           **solver_kw) -> Embedding:
    """Embedding steered by a barrier potential with weight alpha."""
    graph = build_graph(points, k, sigma)
    return embed_graph(graph, potential=potential, alpha=alpha, n=n,
                       **solver_kw)


def embed_graph(graph: WeightedGraph, potential: Potential | None,
                alpha: float, n: int, skip: int = 1, tol: float = 1e-8,
                seed: int = 0, method: str = "auto",
                require_connected: bool = True) -> Embedding:
    """Shared pipeline working from a prebuilt graph.

    skip=1 is the uniform rule (discard the leading eigenvector); skip=0
    returns the raw constrained minimizer, which is what the decay and
    collapse bounds in `potential_energy`/`nullmass` are stated for.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n + skip > graph.m:
        raise ValueError("n + skip exceeds the number of points")
    if require_connected:
        _, ncomp = connected_components(graph)
        if ncomp != 1:
            raise DisconnectedGraphError(
                "graph has %d components; increase k or embed components "
                "separately" % ncomp)
    lap = laplacian(graph)
    op = lap if potential is None or alpha == 0.0 else schroedinger(
        lap, potential, alpha)
    norm_op = normalize(op, graph.degrees)
    want = min(graph.m, n + skip + 1)  # one spare to detect a cut inside a cluster
    eig = smallest_eigs(norm_op, want, tol=tol, seed=seed, method=method)
    cluster_warning = (want > n + skip and
                       eig.eigenvalues[n + skip] - eig.eigenvalues[n + skip - 1]
                       < CLUSTER_GAP)
    dinv = 1.0 / np.sqrt(graph.degrees)
    z = eig.eigenvectors
    if skip > 0:
        skipped_vec = z[:, skip - 1]
        skipped_val = float(eig.eigenvalues[skip - 1])
    else:
        skipped_vec = np.zeros(graph.m)
        skipped_val = float("nan")
    coords = dinv[:, None] * z[:, skip:skip + n]
    params = {
        "k": graph.k,
        "sigma": graph.sigma,
        "alpha": float(alpha),
        "potential": potential_hash(potential) if potential is not None else None,
        "n": n,
        "skip": skip,
        "seed": seed,
        "solver": eig.method,
        "converged": eig.converged,
    }
    if cluster_warning:
        # retained subspace touches a degenerate cluster; columns are kept
        # in deterministic order but are not individually meaningful
        params["cluster_warning"] = True
    return Embedding(coords=coords,
                     eigenvalues=eig.eigenvalues[skip:skip + n].copy(),
                     skipped_vector=skipped_vec, skipped_value=skipped_val,
                     degrees=graph.degrees, params=params)


def quadratic_minimizer(graph: WeightedGraph, potential: Potential | None,
                        alpha: float, n: int, **kw) -> Embedding:
    """Minimizer of the constrained trace problem itself (no skip)."""
    return embed_graph(graph, potential, alpha, n, skip=0, **kw)


def potential_energy(emb: Embedding, potential: Potential) -> float:
    """trace(y^T V y): how much barrier mass the embedding still carries."""
    if potential.m != emb.m:
        raise ValueError("dimension mismatch: embedding %d, potential %d"
                         % (emb.m, potential.m))
    v = realize_potential(potential)
    return max(0.0, v.quad_form(emb.coords))


def nullmass(emb: Embedding, labeled) -> float:
    """Degree-weighted mass sum_i D_ii ||y_i||^2 over unlabeled points.

    With an empty labeled set this equals n exactly (y^T D y = I); the
    collapse bound says it stays near n for large alpha.
    """
    labeled = np.asarray(sorted(set(int(i) for i in labeled)), dtype=np.int64)
    if labeled.size and (labeled.min() < 0 or labeled.max() >= emb.m):
        raise IndexError("labeled index out of range")
    mask = np.ones(emb.m, dtype=bool)
    mask[labeled] = False
    norms2 = np.einsum("ij,ij->i", emb.coords, emb.coords)
    return float(np.sum(emb.degrees[mask] * norms2[mask]))


def to_json(emb: Embedding) -> str:
    """Versioned structured-text dump (row-major coords + provenance)."""
    payload = {
        "version": FORMAT_VERSION,
        "shape": [emb.m, emb.n],
        "coords": [float(v) for v in emb.coords.ravel()],
        "eigenvalues": [float(v) for v in emb.eigenvalues],
        "skipped_vector": [float(v) for v in emb.skipped_vector],
        "skipped_value": None if np.isnan(emb.skipped_value)
        else float(emb.skipped_value),
        "degrees": [float(v) for v in emb.degrees],
        "params": emb.params,
    }
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(body.encode()).hexdigest()[:16]
    payload["digest"] = digest
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def from_json(text: str) -> Embedding:
    payload = json.loads(text)
    if payload.get("version") != FORMAT_VERSION:
        raise ValueError("unsupported embedding format version: %r"
                         % (payload.get("version"),))
    m, n = payload["shape"]
    coords = np.asarray(payload["coords"], dtype=np.float64).reshape(m, n)
    sv = payload.get("skipped_value")
    return Embedding(
        coords=coords,
        eigenvalues=np.asarray(payload["eigenvalues"], dtype=np.float64),
        skipped_vector=np.asarray(payload["skipped_vector"], dtype=np.float64),
        skipped_value=float("nan") if sv is None else float(sv),
        degrees=np.asarray(payload["degrees"], dtype=np.float64),
        params=payload.get("params", {}),
    )
