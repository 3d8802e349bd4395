"""Smallest eigenpairs of sparse symmetric PSD matrices.

Two routes behind one contract: a dense LAPACK solve for moderate sizes
(every benchmark here fits), and thick-restart Lanczos with full
reorthogonalization for larger operators.  Direct Lanczos on a PSD matrix
targets the wrong end of the spectrum, so the iteration runs on the
folded operator c*I - A (c a Gershgorin upper bound), whose largest
eigenvalues are the smallest of A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .graph import SparseSym

DENSE_CUTOFF = 2000


@dataclass
class EigenResult:
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # m x count, orthonormal columns
    residuals: np.ndarray     # ||A v - lambda v||_2 per pair
    iterations: int
    converged: bool
    method: str


def smallest_eigs(a: SparseSym, count: int, tol: float = 1e-8,
                  max_iter: int | None = None, seed: int = 0,
                  method: str = "auto") -> EigenResult:
    """The `count` algebraically smallest eigenpairs of a symmetric PSD
    matrix.

    Deterministic for a fixed seed.  Non-convergence is not fatal: the
    best iterate comes back with converged=False and honest residuals.
    """
    m = a.m
    if not 1 <= count <= m:
        raise ValueError("count must be in [1, %d], got %d" % (m, count))
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method == "auto":
        method = "dense" if m <= DENSE_CUTOFF else "lanczos"
    if method == "lanczos" and (m < 30 or count > m - 2):
        method = "dense"  # Krylov bookkeeping needs room; exact solve is cheap here
    if method == "dense":
        return _dense_smallest(a, count)
    if method == "lanczos":
        return _lanczos_smallest(a, count, tol, max_iter, seed)
    raise ValueError("unknown method %r" % (method,))


def _dense_smallest(a: SparseSym, count: int) -> EigenResult:
    dense = a.dense()
    if a.m > 1 and count < a.m:
        vals, vecs = sla.eigh(dense, subset_by_index=[0, count - 1])
    else:
        vals, vecs = np.linalg.eigh(dense)
        vals, vecs = vals[:count], vecs[:, :count]
    vecs = _fix_signs(vecs)
    res = _residuals(a, vals, vecs)
    return EigenResult(eigenvalues=vals, eigenvectors=vecs, residuals=res,
                       iterations=1, converged=True, method="dense")


def _lanczos_smallest(a: SparseSym, count: int, tol: float,
                      max_iter: int | None, seed: int) -> EigenResult:
    m = a.m
    shift = max(_gershgorin_upper(a), 1e-300)
    scale = max(1.0, shift)
    restarts = 50 * count if max_iter is None else max_iter
    maxdim = min(m, max(4 * count + 40, 80))
    keep = min(count + 10, maxdim - 2)

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(m)
    basis = np.empty((m, maxdim + 1))
    basis[:, 0] = v / np.linalg.norm(v)
    proj = np.zeros((maxdim + 1, maxdim + 1))

    j = 0                 # index of the next vector to expand
    iterations = 0
    converged = False
    exhausted = False     # basis spans an invariant subspace
    theta = ritz = None
    beta_last = 0.0

    for _ in range(max(1, restarts)):
        while j < maxdim:
            u = shift * basis[:, j] - a.matvec(basis[:, j])
            proj[j, j] = float(basis[:, j] @ u)
            u -= basis[:, :j + 1] @ (basis[:, :j + 1].T @ u)
            u -= basis[:, :j + 1] @ (basis[:, :j + 1].T @ u)  # reorth twice
            beta = float(np.linalg.norm(u))
            iterations += 1
            if beta < 1e-12 * scale:
                # invariant subspace hit; try to continue in its complement
                u = rng.standard_normal(m)
                u -= basis[:, :j + 1] @ (basis[:, :j + 1].T @ u)
                u -= basis[:, :j + 1] @ (basis[:, :j + 1].T @ u)
                beta = float(np.linalg.norm(u))
                if beta < 1e-8:
                    exhausted = True
                    j += 1
                    break
                proj[j + 1, j] = proj[j, j + 1] = 0.0
            else:
                proj[j + 1, j] = proj[j, j + 1] = beta
            basis[:, j + 1] = u / beta
            j += 1

        hsize = j
        theta_all, s = np.linalg.eigh(proj[:hsize, :hsize])
        order = np.argsort(theta_all)[::-1][:keep]  # largest of folded op
        theta, s = theta_all[order], s[:, order]
        ritz = basis[:, :hsize] @ s
        beta_last = 0.0 if exhausted else float(proj[hsize, hsize - 1])
        est = np.abs(beta_last * s[hsize - 1, :])
        if exhausted or np.all(est[:count] <= tol * scale):
            converged = True
            break

        # thick restart: kept Ritz vectors + the trailing Lanczos vector
        basis[:, :keep] = ritz
        basis[:, keep] = basis[:, hsize]
        proj[:, :] = 0.0
        proj[:keep, :keep] = np.diag(theta)
        proj[keep, :keep] = beta_last * s[hsize - 1, :]
        proj[:keep, keep] = proj[keep, :keep]
        j = keep

    lam = shift - theta[:count]
    vecs = ritz[:, :count]
    idx = np.argsort(lam, kind="stable")
    lam, vecs = lam[idx], np.ascontiguousarray(vecs[:, idx])
    vecs, _ = np.linalg.qr(vecs)  # exact orthonormality for the contract
    vecs = _fix_signs(vecs)
    res = _residuals(a, lam, vecs)
    converged = converged and bool(np.all(res <= 10.0 * tol * scale))
    return EigenResult(eigenvalues=lam, eigenvectors=vecs, residuals=res,
                       iterations=iterations, converged=converged,
                       method="lanczos")


def _gershgorin_upper(a: SparseSym) -> float:
    if a.m == 0:
        return 0.0
    radius = np.zeros(a.m)
    center = np.zeros(a.m)
    on = a.rows == a.cols
    center[a.rows[on]] = a.vals[on]
    off = ~on
    absv = np.abs(a.vals[off])
    np.add.at(radius, a.rows[off], absv)
    np.add.at(radius, a.cols[off], absv)
    return float(np.max(center + radius))


def _residuals(a: SparseSym, vals, vecs) -> np.ndarray:
    r = a.matvec(vecs) - vecs * vals[None, :]
    return np.linalg.norm(r, axis=0)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: largest-magnitude entry positive."""
    vecs = vecs.copy()
    for col in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, col])))
        if vecs[i, col] < 0:
            vecs[:, col] = -vecs[:, col]
    return vecs
