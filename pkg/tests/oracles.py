"""Independent reference computations used to check the package.

Nothing here imports the package's LP, geometry or search code; each oracle
takes the most direct route available (enumeration, closed forms, scipy's
convex hull) even when that is slow.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.spatial import ConvexHull


def lp_by_vertices(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, maximize=False, tol=1e-9):
    """Optimum of ``c.x`` over ``A_eq x = b_eq, A_ub x <= b_ub, x >= 0`` by basic solutions.

    Every choice of ``n`` active rows (all equalities included) is solved and
    kept when feasible.  Returns ``None`` for an infeasible problem.  The
    caller guarantees boundedness.
    """
    c = np.asarray(c, float)
    n = c.size
    eq = [] if A_eq is None else list(zip(np.atleast_2d(A_eq), np.atleast_1d(b_eq)))
    ineq = [] if A_ub is None else list(zip(np.atleast_2d(A_ub), np.atleast_1d(b_ub)))
    ineq += [(-np.eye(n)[j], 0.0) for j in range(n)]
    need = n - len(eq)
    best = None
    if need < 0:
        return None
    for rows in itertools.combinations(range(len(ineq)), need):
        A = np.array([a for a, _ in eq] + [ineq[r][0] for r in rows]).reshape(-1, n)
        b = np.array([v for _, v in eq] + [ineq[r][1] for r in rows])
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        x = np.linalg.solve(A, b)
        if any(abs(a @ x - v) > tol for a, v in eq):
            continue
        if any(a @ x - v > tol for a, v in ineq):
            continue
        val = float(c @ x)
        if best is None or (val > best if maximize else val < best):
            best = val
    return best


def hull_radius_2d(vectors, d) -> float:
    """Largest ``t`` with ``t d`` in ``absco(vectors)`` from the facets of the 2D hull."""
    V = np.asarray(vectors, float)
    pts = np.vstack([V, -V])
    hull = ConvexHull(pts)
    d = np.asarray(d, float)
    best = np.inf
    for eq in hull.equations:  # a.y + b <= 0 inside
        a, b = eq[:-1], eq[-1]
        s = a @ d
        if s > 1e-15:
            best = min(best, -b / s)
    return float(best)


def ell1_ball_radius_2d(vectors) -> float:
    return min(hull_radius_2d(vectors, e) for e in np.eye(2))


def ell1_sphere(N: int, res: int) -> np.ndarray:
    pts = []
    for comp in itertools.product(range(res + 1), repeat=N):
        if sum(comp) != res:
            continue
        u = np.array(comp, float) / res
        for signs in itertools.product((1.0, -1.0), repeat=N):
            pts.append(u * np.array(signs))
    return np.unique(np.array(pts), axis=0)


def min_gain_grid(M, res: int = 2000) -> float:
    """``min ||M x||_1`` over a grid of the 2D unit l1 sphere."""
    M = np.asarray(M, float)
    s = np.linspace(0.0, 1.0, res + 1)
    pts = []
    for a in s:
        for sx, sy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            pts.append((sx * a, sy * (1.0 - a)))
    X = np.array(pts)
    return float(np.abs(X @ M.T).sum(axis=1).min())


def induced(M, norm: str) -> float:
    M = np.asarray(M, float)
    if norm == "ell1":
        return float(np.abs(M).sum(axis=0).max())
    if norm == "ellinf":
        return float(np.abs(M).sum(axis=1).max())
    return float(np.linalg.norm(M, 2))


def exhaustive_chi(members, depth: int, norm: str = "ell1"):
    """Max induced norm over every word of length <= depth (the empty word counts as 1)."""
    mats = [np.asarray(A, float) for A in members]
    N = mats[0].shape[0]
    best, best_word = 1.0, ()
    level = [((), np.eye(N))]
    for _ in range(depth):
        nxt = []
        for w, P in level:
            for i, A in enumerate(mats):
                Q = A @ P
                v = induced(Q, norm)
                if v > best:
                    best, best_word = v, (i,) + w
                nxt.append(((i,) + w, Q))
        level = nxt
    return best, best_word


def power_sup(E, nmax: int, norm: str = "ell1") -> float:
    E = np.asarray(E, float)
    P = np.eye(E.shape[0])
    best = 1.0
    for _ in range(nmax):
        P = E @ P
        best = max(best, induced(P, norm))
    return best


def kalman_pair(A, b, c) -> bool:
    """Controllable (A, b) and observable (A, c) by matrix rank."""
    A = np.asarray(A, float)
    N = A.shape[0]
    C = np.column_stack([np.linalg.matrix_power(A, k) @ b for k in range(N)])
    O = np.vstack([c @ np.linalg.matrix_power(A, k) for k in range(N)])
    return bool(np.linalg.matrix_rank(C) == N and np.linalg.matrix_rank(O) == N)


def common_invariant(members, basis, tol=1e-8) -> bool:
    """``span(basis)`` is invariant under every member (projection residual)."""
    U, _ = np.linalg.qr(np.asarray(basis, float).T)
    for A in members:
        R = A @ U - U @ (U.T @ A @ U)
        if np.linalg.norm(R) > tol * max(1.0, np.linalg.norm(A)):
            return False
    return True


# random families -----------------------------------------------------------


def random_irreducible(rng, N: int, det_margin: float = 0.1):
    """Dense random matrix (irreducible a.s.) with ``|det(A - I)|`` above a margin."""
    while True:
        A = rng.uniform(-1.0, 1.0, size=(N, N))
        if abs(np.linalg.det(A - np.eye(N))) > det_margin:
            return A


def block_upper_family(rng, N: int = 3, M: int = 2, k: int = 1):
    """Members sharing the invariant subspace ``span(e_1..e_k)``, hidden by a rotation."""
    Q, _ = np.linalg.qr(rng.normal(size=(N, N)))
    out = []
    for _ in range(M):
        A = rng.normal(size=(N, N))
        A[k:, :k] = 0.0
        out.append(Q @ A @ Q.T)
    return out, Q[:, :k]


def random_triple(rng, N: int, kind: int):
    """``(A, b, c)``; kind 0 generic, 1 uncontrollable, 2 unobservable.

    ``A`` has entries of variance ``1/N`` so that its spectral radius stays
    near one independent of ``N``.
    """
    A = rng.normal(size=(N, N)) / np.sqrt(N)
    b = rng.normal(size=N)
    c = rng.normal(size=N)
    if kind:
        Q, _ = np.linalg.qr(rng.normal(size=(N, N)))
        k = int(rng.integers(1, N))
        if kind == 1:
            A[k:, :k] = 0.0
            b[k:] = 0.0
        else:
            A[:k, k:] = 0.0
            c[k:] = 0.0
        A, b, c = Q @ A @ Q.T, Q @ b, Q @ c
    return A, b, c


def stable_qc_pair(rng, N: int = 2):
    """Two random members scaled to l1 norm at most 0.8, without a shared eigenvector."""
    while True:
        A = rng.normal(size=(N, N))
        B = rng.normal(size=(N, N))
        s = 0.8 / max(induced(A, "ell1"), induced(B, "ell1"))
        A, B = s * A, s * B
        # skip pairs with a (nearly) common real eigenvector
        w, V = np.linalg.eig(A)
        shared = False
        for j in range(N):
            if abs(w[j].imag) > 0:
                continue
            v = V[:, j].real
            Bv = B @ v
            resid = Bv - (v @ Bv) * v
            shared |= bool(np.linalg.norm(resid) < 1e-3 * np.linalg.norm(B))
        if not shared:
            return [A, B]
