"""Finite matrix families and their product sets F_k.

Words are tuples of 0-based member indices written in matrix-product order:
``(i, j, k)`` stands for ``A_i @ A_j @ A_k``, so ``A_k`` acts first.  The empty
word is the identity.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._validation import check_square, check_vector
from .exceptions import ProductCapError

DEFAULT_DEDUP_TOL = 1e-12
DEFAULT_PRODUCT_CAP = 200_000


def product_cap(cap: Optional[int] = None) -> int:
    """Resolve the product cap: explicit value, then ``PEAKBOUND_CAP``, then the default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get("PEAKBOUND_CAP")
    return int(env) if env else DEFAULT_PRODUCT_CAP


class MatrixFamily:
    """Ordered, immutable family of real N x N matrices."""

    def __init__(self, members: Sequence, labels: Optional[Sequence[str]] = None):
        mats = [check_square(A, f"member {i}") for i, A in enumerate(members)]
        if not mats:
            raise ValueError("a matrix family needs at least one member")
        n = mats[0].shape[0]
        for i, A in enumerate(mats):
            if A.shape != (n, n):
                raise ValueError(f"member {i} has shape {A.shape}, expected {(n, n)}")
            A.setflags(write=False)
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != len(mats):
                raise ValueError("labels must match the number of members")
        self.members = tuple(mats)
        self.labels = labels

    @property
    def N(self) -> int:
        return self.members[0].shape[0]

    @property
    def M(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def stack(self) -> np.ndarray:
        return np.stack(self.members)

    def word_matrix(self, word: Sequence[int]) -> np.ndarray:
        P = np.eye(self.N)
        for i in reversed(tuple(word)):
            P = self.members[i] @ P
        return P

    def __eq__(self, other):
        if not isinstance(other, MatrixFamily) or other.M != self.M or other.N != self.N:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.members, other.members)) \
            and self.labels == other.labels

    def __hash__(self):
        return hash((self.M, self.N, tuple(a.tobytes() for a in self.members)))

    def __repr__(self):
        return f"MatrixFamily(M={self.M}, N={self.N})"


def as_family(F) -> MatrixFamily:
    if isinstance(F, MatrixFamily):
        return F
    arr = F
    if isinstance(F, np.ndarray) and F.ndim == 2:
        arr = [F]
    return MatrixFamily(list(arr))


@dataclass(frozen=True)
class ProductSet:
    """Distinct products of at most ``k`` factors from F together with I.

    ``matrices[q]`` is the product of ``words[q]``; items appear in
    breadth-first order, so each stored word is the shortest one found.
    """

    words: tuple
    matrices: np.ndarray = field(repr=False)
    k: int
    dedup_tol: float
    generated: int = 0

    def __len__(self):
        return len(self.words)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([len(w) for w in self.words], dtype=int)

    def items(self):
        return list(zip(self.words, self.matrices))


def _find(stack: np.ndarray, count: int, X: np.ndarray, tol: float) -> int:
    if count == 0:
        return -1
    diff = np.abs(stack[:count] - X).reshape(count, -1).max(axis=1)
    hit = np.flatnonzero(diff <= tol)
    return int(hit[0]) if hit.size else -1


def enumerate_products(F, k: int, dedup_tol: float = DEFAULT_DEDUP_TOL,
                       cap: Optional[int] = None) -> ProductSet:
    """Breadth-first enumeration of F_k with entrywise deduplication.

    ``cap`` bounds the number of candidate products formed (before
    deduplication); exceeding it raises ``ProductCapError``.
    """
    F = as_family(F)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if dedup_tol < 0:
        raise ValueError("dedup_tol must be nonnegative")
    cap = product_cap(cap)
    N = F.N
    capacity = 64
    stack = np.empty((capacity, N, N))
    stack[0] = np.eye(N)
    words = [()]
    count = 1
    frontier = [0]
    generated = 1
    for _ in range(k):
        if not frontier:
            break
        if generated + len(frontier) * F.M > cap:
            raise ProductCapError(
                f"enumerating F_{k} needs more than {cap} products; "
                "raise the cap (PEAKBOUND_CAP / --cap) or lower the depth")
        new = []
        for q in frontier:
            P = stack[q]
            w = words[q]
            for i, A in enumerate(F.members):
                generated += 1
                X = A @ P
                if _find(stack, count, X, dedup_tol) >= 0:
                    continue
                if count == capacity:
                    capacity *= 2
                    grown = np.empty((capacity, N, N))
                    grown[:count] = stack[:count]
                    stack = grown
                stack[count] = X
                words.append((i,) + w)
                new.append(count)
                count += 1
        frontier = new
    mats = stack[:count].copy()
    mats.setflags(write=False)
    return ProductSet(tuple(words), mats, k, dedup_tol, generated)


def orbit(P: ProductSet, x) -> np.ndarray:
    """Rows ``L @ x`` for every ``L`` in ``P`` (same order as ``P.words``)."""
    N = P.matrices.shape[1]
    v = check_vector(x, N, "x")
    return P.matrices @ v


def minimal_length(P: ProductSet, target, tol: float = DEFAULT_DEDUP_TOL) -> Optional[int]:
    T = check_square(target, "target")
    if T.shape != P.matrices.shape[1:]:
        raise ValueError("target shape does not match the product set")
    diff = np.abs(P.matrices - T).reshape(len(P), -1).max(axis=1)
    hits = np.flatnonzero(diff <= tol)
    if hits.size == 0:
        return None
    return int(min(len(P.words[h]) for h in hits))
