"""Dense symmetric eigensolver: Householder tridiagonalization + implicit QL.

Kept in-house so the toolkit's numerical oracle has no dependencies beyond
numpy array storage. The target accuracy (residual ~1e-12 relative) is far
inside the 1e-8 tolerance used by the oracles built on top of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ValidationError
from .graph import Graph

_MOD = "spectral-ops"

DENSE_CAP = 4096


@dataclass(frozen=True)
class Eigenpair:
    """Eigenvalue of the (unnormalized) adjacency operator with a unit vector."""

    value: float
    vector: np.ndarray


def householder_tridiagonalize(A: np.ndarray):
    """Reduce a symmetric matrix to tridiagonal form T = Q^T A Q.

    Returns (d, e, Q) with d the diagonal, e the subdiagonal (length n-1)
    and Q the accumulated orthogonal transform.
    """
    a = np.array(A, dtype=np.float64)
    n = a.shape[0]
    Q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        # apply P = I - 2 v v^T on both sides of the trailing block
        sub = a[k + 1:, k + 1:]
        w = sub @ v
        c = v @ w
        sub -= 2.0 * np.outer(v, w) + 2.0 * np.outer(w, v) - 4.0 * c * np.outer(v, v)
        a[k + 1:, k + 1:] = 0.5 * (sub + sub.T)
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v)
    d = np.diag(a).copy()
    e = np.diag(a, -1).copy()
    return d, e, Q


def tridiagonal_ql(d: np.ndarray, e: np.ndarray, Q: np.ndarray | None = None,
                   max_sweeps: int = 50):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    `d` is the diagonal, `e` the subdiagonal; both are modified in place.
    When Q is given the rotations accumulate into its columns so that on
    return Q's columns are eigenvectors. Returns (eigenvalues, Q).
    """
    n = len(d)
    d = np.asarray(d, dtype=np.float64)
    ee = np.zeros(n)
    ee[: n - 1] = e
    eps = np.finfo(float).eps
    # absolute deflation floor; a purely relative test never fires when two
    # adjacent diagonal entries sit in a large (near-)null space
    scale = float(np.abs(d).max(initial=0.0) + np.abs(ee).max(initial=0.0))
    floor = eps * max(scale, 1e-300)
    for l in range(n):
        for sweep in range(max_sweeps + 1):
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(ee[m]) <= max(eps * dd, floor):
                    break
                m += 1
            if m == l:
                break
            if sweep == max_sweeps:
                raise ValidationError("QL iteration failed to converge",
                                      module=_MOD, stage="dense_spectrum")
            g = (d[l + 1] - d[l]) / (2.0 * ee[l])
            r = math.hypot(g, 1.0)
            sgn = r if g >= 0 else -r
            g = d[m] - d[l] + ee[l] / (g + sgn)
            s, c = 1.0, 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * ee[i]
                b = c * ee[i]
                r = math.hypot(f, g)
                ee[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    ee[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if Q is not None:
                    col1 = Q[:, i + 1].copy()
                    Q[:, i + 1] = s * Q[:, i] + c * col1
                    Q[:, i] = c * Q[:, i] - s * col1
            else:
                d[l] -= p
                ee[l] = g
                ee[m] = 0.0
    return d, Q


def dense_symmetric_eig(A: np.ndarray):
    """Full eigendecomposition, eigenvalues ascending."""
    d, e, Q = householder_tridiagonalize(A)
    vals, Q = tridiagonal_ql(d, e, Q)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    Q = Q[:, order]
    # deterministic sign: largest-|.| component of each vector is positive
    idx = np.argmax(np.abs(Q), axis=0)
    signs = np.sign(Q[idx, np.arange(Q.shape[1])])
    signs[signs == 0] = 1.0
    return vals, Q * signs


def adjacency_dense(G: Graph) -> np.ndarray:
    A = np.zeros((G.n, G.n))
    src = np.repeat(np.arange(G.n), G.degrees())
    A[src, G.nbrs] = 1.0
    return A


def dense_spectrum(G: Graph, cap: int = DENSE_CAP) -> list:
    """All adjacency eigenpairs of G, eigenvalues ascending.

    Residuals are checked against 1e-8 * (max degree) before returning.
    """
    if G.n > cap:
        raise BudgetError(f"n={G.n} exceeds dense eigensolver cap {cap}",
                          module=_MOD, stage="dense_spectrum")
    A = adjacency_dense(G)
    vals, vecs = dense_symmetric_eig(A)
    scale = max(1.0, float(G.degrees().max(initial=0)))
    resid = np.abs(A @ vecs - vecs * vals).max(axis=0)
    worst = float(resid.max(initial=0.0))
    if worst > 1e-8 * scale:
        raise ValidationError(
            f"eigensolver residual {worst:.3e} exceeds tolerance",
            module=_MOD, stage="dense_spectrum")
    return [Eigenpair(float(v), vecs[:, i].copy()) for i, v in enumerate(vals)]
