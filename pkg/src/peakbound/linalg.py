"""Dense real linear algebra for small matrices (N <= 8 or so).

Norm tags are ``"ell1"``, ``"ell2"`` and ``"ellinf"``; the short CLI spellings
``l1``/``l2``/``linf`` are accepted everywhere a norm is expected.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ._validation import check_norm, check_square, check_vector

DEFAULT_RANK_TOL = 1e-9
ELL2_REL_TOL = 1e-10
_SQUARING_CAP = 64


def vector_norm(x, norm="ell1") -> float:
    v = np.asarray(x, dtype=float)
    norm = check_norm(norm)
    if norm == "ell1":
        return float(np.sum(np.abs(v)))
    if norm == "ellinf":
        return float(np.max(np.abs(v))) if v.size else 0.0
    return float(np.sqrt(np.dot(v, v)))


def _gram_top_eigenvalue(G: np.ndarray) -> float:
    # Power method accelerated by repeated squaring: H <- H @ H converges to a
    # multiple of the projector on the top eigenspace of the PSD matrix G.
    scale = float(np.max(np.abs(G)))
    if scale == 0.0:
        return 0.0
    H = G / scale
    for _ in range(_SQUARING_CAP):
        H_next = H @ H
        m = float(np.max(np.abs(H_next)))
        if m == 0.0:
            break
        H_next /= m
        done = np.max(np.abs(H_next - H)) <= ELL2_REL_TOL * 1e-3
        H = H_next
        if done:
            break
    j = int(np.argmax(np.sum(H * H, axis=0)))
    v = H[:, j]
    # a few plain power steps polish the direction; the Rayleigh quotient is
    # then accurate to second order
    for _ in range(3):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    return float(v @ G @ v)


def induced_norm(M, norm="ell1") -> float:
    """Operator norm of a square matrix.

    ``ell1`` and ``ellinf`` are exact (max column / row absolute sum).  ``ell2``
    is the square root of the top eigenvalue of ``M.T @ M`` found by power
    iteration, converged to a relative tolerance well below 1e-10.
    """
    A = check_square(M)
    norm = check_norm(norm)
    if norm == "ell1":
        return float(np.max(np.sum(np.abs(A), axis=0)))
    if norm == "ellinf":
        return float(np.max(np.sum(np.abs(A), axis=1)))
    return float(np.sqrt(max(_gram_top_eigenvalue(A.T @ A), 0.0)))


def _induced_norm_unchecked(A: np.ndarray, norm: str) -> float:
    # hot path used by product searches; inputs are already validated
    if norm == "ell1":
        return float(np.abs(A).sum(axis=0).max())
    if norm == "ellinf":
        return float(np.abs(A).sum(axis=1).max())
    return float(np.sqrt(max(_gram_top_eigenvalue(A.T @ A), 0.0)))


def _eliminate(A: np.ndarray, tol: float):
    """Gaussian elimination with complete pivoting.

    Returns the original column indices of the pivots, in pivot order.  The
    stopping threshold is ``tol`` times the largest column 2-norm of ``A``.
    """
    A = np.array(A, dtype=float)
    if A.size == 0:
        return []
    col_norms = np.sqrt(np.sum(A * A, axis=0))
    thresh = tol * float(np.max(col_norms))
    if thresh == 0.0:
        return []
    rows, cols = A.shape
    col_idx = list(range(cols))
    pivots = []
    for k in range(min(rows, cols)):
        sub = np.abs(A[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= thresh:
            break
        i += k
        j += k
        A[[k, i], :] = A[[i, k], :]
        A[:, [k, j]] = A[:, [j, k]]
        col_idx[k], col_idx[j] = col_idx[j], col_idx[k]
        pivots.append(col_idx[k])
        factors = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(factors, A[k, k:])
    return pivots


def rank(vectors: Sequence, tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank of a list of equal-length vectors (0 for an empty list)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if len(vectors) == 0:
        return 0
    V = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    return len(_eliminate(V, tol))


def independent_subset(vectors: Sequence, tol: float = DEFAULT_RANK_TOL) -> list[int]:
    """Indices of a maximal numerically independent subset of ``vectors``."""
    if len(vectors) == 0:
        return []
    V = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    return sorted(_eliminate(V, tol))


def min_gain(M, norm="ell1", tol: float = DEFAULT_RANK_TOL) -> float:
    """``min ||M x||`` over the unit sphere of ``norm``.

    Singular input (rank test with relative threshold ``tol``) gives exactly 0;
    otherwise the value is ``1 / ||M^-1||``.
    """
    A = check_square(M)
    norm = check_norm(norm)
    if rank(list(A.T), tol) < A.shape[0]:
        return 0.0
    return 1.0 / induced_norm(np.linalg.inv(A), norm)


def unit(x, norm="ell1") -> np.ndarray:
    v = check_vector(x, nonzero=True)
    return v / vector_norm(v, norm)
