"""Quasi-controllability of matrix families and the measure sigma_p.

A family is quasi-controllable when no nonzero proper subspace is invariant
under all of its members.  ``sigma_p`` is the infimum over unit vectors ``x``
of the radius of the largest norm ball inside ``absco(F_p(x))``; it is nonzero
exactly for quasi-controllable families once ``p >= N - 1``.

``sigma_estimate`` brackets the infimum:

* every evaluated ``x`` gives an upper estimate (deterministic grid on the
  unit l1 sphere, then multistart pattern search);
* a certified lower bound comes from covering the l1 sphere by simplices and
  bounding the radius uniformly on each simplex, by interpolating the hull
  weights found at the vertices; the worst simplices are bisected until the
  bracket is tight or the cell budget runs out;
* a negative answer is certified by an explicit invariant subspace.
"""
from __future__ import annotations

import heapq
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from ._validation import check_norm, check_vector
from .geometry import ball_directions, directional_radii, inscribed_radius
from .linalg import (DEFAULT_RANK_TOL, _induced_norm_unchecked, independent_subset,
                     rank, vector_norm)
from .semigroup import DEFAULT_DEDUP_TOL, MatrixFamily, ProductSet, as_family, enumerate_products, orbit

_AUTO_GRID = {1: 1, 2: 48, 3: 8, 4: 4}
# branch-and-bound cell budgets; N = 4 families often need tens of thousands
_AUTO_CELLS = {1: 200, 2: 3000, 3: 3000, 4: 200000}


@dataclass(frozen=True)
class QCParams:
    """Knobs for sigma estimation.

    ``p=None`` means ``N - 1``.  Values of ``p`` below ``N - 1`` are refused
    unless ``exploratory`` is set, and such reports are flagged.
    """

    p: Optional[int] = None
    norm: str = "ell1"
    n_starts: int = 4
    grid_resolution: Optional[int] = None
    rank_tol: float = DEFAULT_RANK_TOL
    seed: int = 0
    exploratory: bool = False
    threshold: float = 1e-7
    certify: bool = True
    max_cells: Optional[int] = None
    rel_gap: float = 0.1
    dedup_tol: float = DEFAULT_DEDUP_TOL
    cap: Optional[int] = None
    ell2_resolution: int = 32
    n_jobs: int = 1

    def resolve_p(self, N: int) -> int:
        p = max(N - 1, 0) if self.p is None else int(self.p)
        if p < 0:
            raise ValueError("p must be nonnegative")
        if p < N - 1 and not self.exploratory:
            raise ValueError(
                f"p={p} is below N-1={N - 1}; conclusions need p >= N-1 "
                "(pass exploratory=True to run anyway)")
        return p

    def grid_for(self, N: int) -> int:
        if self.grid_resolution is not None:
            return max(int(self.grid_resolution), 1)
        return _AUTO_GRID.get(N, 3)

    def cells_for(self, N: int) -> int:
        if self.max_cells is not None:
            return max(int(self.max_cells), 1)
        return _AUTO_CELLS.get(N, 20000)


@dataclass
class QCReport:
    verdict: str  # "yes" | "no" | "undetermined"
    sigma_upper: float
    sigma_lower: Optional[float]
    worst_x: np.ndarray
    certificate: Optional[list] = None
    notes: str = ""
    p: int = 0
    norm: str = "ell1"
    exploratory: bool = False
    lipschitz_constant: Optional[float] = None
    lipschitz_bound: Optional[float] = None
    cells: int = 0
    evaluations: int = 0

    @property
    def is_quasi_controllable(self) -> str:
        return self.verdict

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "sigma_upper": {"value": self.sigma_upper, "method": "estimated"},
            "sigma_lower": {"value": self.sigma_lower, "method": "certified"},
            "worst_x": [float(v) for v in self.worst_x],
            "certificate": None if self.certificate is None else
            {"basis": [[float(v) for v in b] for b in self.certificate],
             "method": "certified"},
            "p": self.p,
            "norm": self.norm,
            "exploratory": self.exploratory,
            "lipschitz_constant": self.lipschitz_constant,
            "lipschitz_bound": {"value": self.lipschitz_bound, "method": "certified"},
            "cells": self.cells,
            "evaluations": self.evaluations,
            "notes": self.notes,
        }


def _params(params: Optional[QCParams], **overrides) -> QCParams:
    params = QCParams() if params is None else params
    if overrides:
        params = replace(params, **overrides)
    return replace(params, norm=check_norm(params.norm))


# ---------------------------------------------------------------------------
# span tests and negative certificates


def span_test(F, p: int, x, tol: float = DEFAULT_RANK_TOL, products: Optional[ProductSet] = None):
    """``(full, dimension)`` of ``span F_p(x)``."""
    F = as_family(F)
    x = check_vector(x, F.N, "x", nonzero=True)
    if p < 0:
        raise ValueError("p must be nonnegative")
    P = products if products is not None else enumerate_products(F, p)
    dim = rank(list(orbit(P, x)), tol)
    return dim == F.N, dim


def invariant_subspace_certificate(F, x, p: int, tol: float = DEFAULT_RANK_TOL,
                                   products: Optional[ProductSet] = None) -> Optional[list]:
    """Basis of ``span F_N(x)`` when it is a verified common invariant subspace.

    Returns ``None`` when the span of ``F_p(x)`` is all of R^N (nothing to
    certify) or when some member moves the span by more than ``tol``
    (relative to the member's Frobenius norm).
    """
    F = as_family(F)
    x = check_vector(x, F.N, "x", nonzero=True)
    N = F.N
    P = products if products is not None and products.k >= N else enumerate_products(F, max(N, p))
    if p < P.k:
        full, _ = span_test(F, p, x, tol)
    else:
        full = rank(list(orbit(P, x)), tol) == N
    if full:
        return None
    vecs = orbit(P, x)
    idx = independent_subset(list(vecs), tol)
    if not idx or len(idx) >= N:
        return None
    basis = vecs[idx]
    if not verify_invariant_subspace(F, basis, tol):
        return None
    return [b.copy() for b in basis]


def verify_invariant_subspace(F, basis, tol: float = DEFAULT_RANK_TOL) -> bool:
    F = as_family(F)
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    if B.shape[0] == 0 or B.shape[0] >= F.N:
        return False
    U, _ = np.linalg.qr(B.T)
    for A in F:
        R = A @ U - U @ (U.T @ A @ U)
        if np.linalg.norm(R) > tol * max(np.linalg.norm(A), 1.0):
            return False
    return True


def _eigen_candidates(A: np.ndarray) -> list:
    out = []
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError:
        return out
    for k in range(V.shape[1]):
        v = V[:, k]
        for part in (v.real, v.imag):
            n = np.linalg.norm(part)
            if n > 1e-8:
                out.append(part / n)
    return out


def find_invariant_subspace(F, p: int, tol: float = DEFAULT_RANK_TOL, seed: int = 0,
                            extra: Iterable = (), products: Optional[ProductSet] = None):
    """Look for a nonzero proper common invariant subspace.

    Any such subspace is invariant under a generic linear combination ``C`` of
    the members, hence spanned by eigenvectors (or real/imaginary parts of
    eigenvector pairs) of ``C``; those are tried as seeds, together with the
    eigenvectors of each member and any ``extra`` vectors.  Returns
    ``(x, basis)`` or ``None``.
    """
    F = as_family(F)
    rng = np.random.default_rng(seed)
    cands = []
    for _ in range(2):
        coef = rng.normal(size=F.M)
        cands += _eigen_candidates(sum(c * A for c, A in zip(coef, F.members)))
    for A in F:
        cands += _eigen_candidates(A)
    cands += [np.asarray(v, dtype=float) for v in extra]
    N = F.N
    PN = products if products is not None and products.k >= N else enumerate_products(F, max(N, p))
    for x in cands:
        if not np.any(x):
            continue
        if rank(list(orbit(PN, x)), tol) == N:
            continue
        basis = invariant_subspace_certificate(F, x, p, tol, products=PN)
        if basis is not None:
            return x, basis
    return None


# ---------------------------------------------------------------------------
# radius evaluation


_POOL = 12  # recently optimal bases kept per direction


class _RadiusOracle:
    """Cached directional radii of ``absco(F_p(x))`` for the ball directions."""

    def __init__(self, P: ProductSet, norm: str, tol: float, ell2_resolution: int):
        self.mats = P.matrices
        self.N = self.mats.shape[1]
        self.norm = norm
        self.tol = tol
        self.D, self.factor, self.method = ball_directions(norm, self.N, ell2_resolution)
        self._cache = {}
        self._pool = np.full((len(self.D), _POOL, self.N), -1, dtype=int)
        self.evaluations = 0

    def raw(self, x: np.ndarray):
        """Per-direction radii (unnormalized x) and signed hull weights, one row per direction."""
        key = x.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.evaluations += 1
        G = self.mats @ x
        K, Q = len(self.D), len(self.mats)
        t, theta, support = directional_radii(G, self.D, self._pool, with_support=True)
        fresh = [k for k in range(K) if support[k, 0] >= 0 and
                 not np.any(np.all(self._pool[k] == support[k], axis=1))]
        if fresh or t.min() <= 0.0:
            # a basis accepted from the pool proves full rank; otherwise check
            if rank(list(G), self.tol) < self.N:
                t, theta = np.zeros(K), np.zeros((K, Q))
        for k in range(K):
            if support[k, 0] >= 0:
                # most recently used first
                rest = self._pool[k][~np.all(self._pool[k] == support[k], axis=1)]
                self._pool[k, 0] = support[k]
                self._pool[k, 1:] = rest[:_POOL - 1]
        out = (t, theta)
        self._cache[key] = out
        return out

    def upper(self, x: np.ndarray) -> float:
        """An upper bound on the normalized inscribed radius at ``x``."""
        radii, _ = self.raw(x)
        return float(radii.min()) / vector_norm(x, self.norm)

    def value(self, x: np.ndarray) -> float:
        """Inscribed radius at ``x / ||x||`` (a lower bound for ell2)."""
        return self.factor * self.upper(x)


def radius_at(F, p: int, x, norm="ell1", tol: float = DEFAULT_RANK_TOL,
              products: Optional[ProductSet] = None, ell2_resolution: int = 32) -> float:
    """Inscribed ``norm``-ball radius of ``absco(F_p(x / ||x||))``."""
    F = as_family(F)
    norm = check_norm(norm)
    x = check_vector(x, F.N, "x", nonzero=True)
    P = products if products is not None else enumerate_products(F, p)
    u = x / vector_norm(x, norm)
    return inscribed_radius(orbit(P, u), norm, tol, ell2_resolution).radius


def l1_sphere_grid(N: int, resolution: int) -> np.ndarray:
    """Points of the unit l1 sphere with coordinates in ``(1/resolution) Z``.

    Only one of each pair ``x, -x`` is kept (first nonzero coordinate > 0).
    """
    pts = []
    for comp in itertools.combinations_with_replacement(range(N), resolution):
        u = np.bincount(np.asarray(comp, dtype=int), minlength=N) / resolution
        nz = np.flatnonzero(u)
        for signs in itertools.product((1.0, -1.0), repeat=len(nz) - 1):
            x = u.copy()
            x[nz[1:]] *= np.asarray(signs)
            pts.append(x)
    return np.asarray(pts)


def _pattern_search(f: Callable, x0: np.ndarray, norm: str, h0: float = 0.125,
                    h_min: float = 1e-7, budget: int = 400):
    x = x0 / vector_norm(x0, norm)
    fx = f(x)
    N = x.size
    h = h0
    used = 1
    while h >= h_min and used < budget:
        improved = False
        for i in range(N):
            for s in (1.0, -1.0):
                y = x.copy()
                y[i] += s * h
                ny = vector_norm(y, norm)
                if ny == 0.0:
                    continue
                y /= ny
                fy = f(y)
                used += 1
                if fy < fx:
                    x, fx, improved = y, fy, True
        if not improved:
            h *= 0.5
    return x, fx


def grid_sigma(F, p: int, norm="ell1", resolution: Optional[int] = None,
               tol: float = DEFAULT_RANK_TOL, ell2_resolution: int = 32) -> float:
    """Minimum of the inscribed radius over the fixed l1-sphere grid.

    The grid depends only on ``N`` and ``resolution``, which makes values for
    different families directly comparable.
    """
    F = as_family(F)
    norm = check_norm(norm)
    res = QCParams(grid_resolution=resolution).grid_for(F.N)
    oracle = _RadiusOracle(enumerate_products(F, p), norm, tol, ell2_resolution)
    return min(oracle.value(x) for x in l1_sphere_grid(F.N, res))


# ---------------------------------------------------------------------------
# certified lower bound by simplex refinement


@dataclass(order=True)
class _Cell:
    lb: float
    order: int
    vertices: np.ndarray = field(compare=False)


def _ball_norms(X: np.ndarray, norm: str) -> np.ndarray:
    # norms along the last axis
    if norm == "ell1":
        return np.abs(X).sum(axis=-1)
    if norm == "ellinf":
        return np.abs(X).max(axis=-1)
    return np.sqrt((X * X).sum(axis=-1))


@lru_cache(maxsize=None)
def _bernstein_maps(J: int):
    """Constant matrices for quadratic interpolation on a ``J``-vertex simplex.

    Returns ``(to_bern, to_cubic, mid)``: ``mid`` maps vertices to edge
    midpoints; ``to_bern`` maps values at vertices and midpoints to degree-2
    Bernstein coefficients; ``to_cubic`` maps the products ``(c, beta)`` of a
    vertex and a degree-2 coefficient (flattened ``c * n_beta + beta``) to the
    degree-3 coefficients of their product.
    """
    edges = list(itertools.combinations(range(J), 2))
    betas = [(a, a) for a in range(J)] + edges
    index = {bt: i for i, bt in enumerate(betas)}
    index.update({(b, a): i for (a, b), i in list(index.items())})
    nb = len(betas)
    mid = np.zeros((len(edges), J))
    to_bern = np.zeros((nb, J + len(edges)))
    for a in range(J):
        to_bern[a, a] = 1.0
    for e, (a, b) in enumerate(edges):
        mid[e, [a, b]] = 0.5
        to_bern[J + e, J + e] = 2.0
        to_bern[J + e, [a, b]] = -0.5
    rows = []

    def row(terms):
        r = np.zeros(J * nb)
        for c, bt, w in terms:
            r[c * nb + index[bt]] += w
        rows.append(r)

    for a in range(J):
        row([(a, (a, a), 1.0)])
    for a in range(J):
        for b in range(J):
            if a != b:
                row([(b, (a, a), 1.0 / 3.0), (a, (a, b), 2.0 / 3.0)])
    for a, b, c in itertools.combinations(range(J), 3):
        row([(c, (a, b), 1.0 / 3.0), (b, (a, c), 1.0 / 3.0), (a, (b, c), 1.0 / 3.0)])
    return to_bern, np.array(rows), mid


class _Certifier:
    """Branch and bound over simplices of the unit l1 sphere.

    For each ball direction ``d`` we need, uniformly over the cell, a point
    ``t d - e(x)`` of ``absco(F_p(x))`` with a small error ``e``.  If every
    direction has one with ``||e|| <= tau``, the hull contains the ball of
    radius ``factor * t - tau`` (compare support functions).

    Two constructions are used and the better one is kept per direction:

    * interpolation: the vertex weights ``theta_j`` (scaled to the common
      value ``t = min_j t_j``) are blended with the barycentric coordinates
      of ``x``; the error is a convex combination of the pair residuals
      ``(W_a^T theta_b + W_b^T theta_a) / 2 - t d`` and is second order in
      the cell size away from kinks of the radius;
    * anchoring at the centroid ``c``: ``M = sum_q theta_q L_q`` maps ``c``
      to ``t d``, and ``||M (x - c)||`` is maximal at a vertex.
    """

    def __init__(self, oracle: _RadiusOracle):
        self.o = oracle
        self.cells = 0
        self.best_upper = np.inf
        self.best_x = None

    def _note(self, x):
        u = self.o.upper(x)
        if u < self.best_upper:
            self.best_upper, self.best_x = u, x

    def _interpolated(self, W: np.ndarray, th: np.ndarray, t: float, d: np.ndarray) -> float:
        # W: (J, Q, N) rows L_q v_a; th: (J, Q) weights with sum |th_j| <= 1
        o = self.o
        P = np.einsum("aqi,bq->abi", W, th)                 # W_a^T theta_b
        R = 0.5 * (P + P.transpose(1, 0, 2)) - t * d
        return o.factor * t - float(_ball_norms(R, o.norm).max())

    def _same_support(self, W: np.ndarray, S: np.ndarray, d: np.ndarray) -> float:
        # weights on a fixed support solve G_S(v)^T theta = d at every vertex,
        # so they vary smoothly over the cell even across kinks of the radius
        J, Q, N = W.shape
        B = W[:, S, :].transpose(0, 2, 1)               # (J, N, |S|)
        try:
            if len(S) == N:
                sol = np.linalg.solve(B, np.broadcast_to(d, (J, N))[..., None])[..., 0]
            else:
                sol = np.stack([np.linalg.lstsq(b, d, rcond=None)[0] for b in B])
        except np.linalg.LinAlgError:
            return -np.inf
        n1 = np.abs(sol).sum(axis=1)
        if not np.all(np.isfinite(n1)) or np.any(n1 == 0.0):
            return -np.inf
        tmin = float(1.0 / n1.max())
        th = np.zeros((J, Q))
        th[:, S] = sol * tmin               # W_a^T th_a = tmin d, sum |th_a| <= 1
        return self._interpolated(W, th, tmin, d)

    def _quadratic(self, V: np.ndarray, W: np.ndarray, S: np.ndarray, d: np.ndarray) -> float:
        """Bound from weights on support ``S`` interpolated quadratically.

        The weights solve ``G_S(x)^T theta = d`` at the vertices and edge
        midpoints.  ``sum_q theta_q(lam) L_q x(lam)`` is then a cubic in the
        barycentric coordinates, and its values lie in the hull of its
        Bernstein coefficients; the weight budget is bounded the same way
        by the degree-2 coefficients.
        """
        o = self.o
        J, Q, N = W.shape
        if len(S) != N:
            return -np.inf
        to_bern, to_cubic, mid = _bernstein_maps(J)
        X = np.vstack([V, mid @ V])
        B = np.einsum("sij,nj->nis", o.mats[S], X)          # (nodes, N, N): G_S(x)^T
        try:
            sol = np.linalg.solve(B, np.broadcast_to(d, (len(X), N))[..., None])[..., 0]
        except np.linalg.LinAlgError:
            return -np.inf
        if not np.all(np.isfinite(sol)):
            return -np.inf
        T = to_bern @ sol                                    # degree-2 coefficients of theta
        budget = float(np.abs(T).sum(axis=1).max())
        P = np.einsum("cqi,bq->cbi", W[:, S, :], T)          # W_c^T T_beta
        coeffs = to_cubic @ P.reshape(-1, N)
        err = float(_ball_norms(coeffs - d, o.norm).max())
        return (o.factor - err) / budget

    def bound(self, V: np.ndarray, target: float = np.inf) -> float:
        """Certified lower bound for the radius on the cell ``V``.

        Cheap constructions are tried first; the fixed-support ones only for
        directions still below ``target``, and only until one direction has
        failed them all (the cell gets split anyway).
        """
        o = self.o
        self.cells += 1
        centre = V.mean(axis=0)
        self._note(centre)
        scale = max(vector_norm(v, o.norm) for v in V)
        goal = target * scale
        radii = np.array([o.raw(v)[0] for v in V])          # (J, K)
        thetas = np.array([o.raw(v)[1] for v in V])         # (J, K, Q)
        rc, thc = o.raw(centre)
        W = np.einsum("qij,aj->aqi", o.mats, V)            # (J, Q, N)
        lb = np.inf
        failed = False
        for k, d in enumerate(o.D):
            best = -np.inf
            t = radii[:, k].min()
            if t > 0.0:
                th = thetas[:, k, :] * (t / radii[:, k])[:, None]
                best = self._interpolated(W, th, t, d)
            if rc[k] > 0.0 and best < goal:
                M = np.einsum("q,qij->ij", thc[k], o.mats)
                err = (V - centre) @ M.T + (M @ centre - rc[k] * d)
                best = max(best, o.factor * rc[k] - float(_ball_norms(err, o.norm).max()))
                if not failed and best < goal:
                    supports = [tuple(np.flatnonzero(np.abs(thc[k]) > 1e-12))]
                    supports += [tuple(np.flatnonzero(np.abs(w) > 1e-12)) for w in thetas[:, k, :]]
                    for S in dict.fromkeys(supports):
                        if not S:
                            continue
                        S = np.array(S)
                        best = max(best, self._quadratic(V, W, S, d))
                        if best >= goal:
                            break
                        best = max(best, self._same_support(W, S, d))
                        if best >= goal:
                            break
                    failed = best < goal
            lb = min(lb, best)
        return lb / scale

    def run(self, max_cells: int, rel_gap: float):
        N = self.o.N
        heap = self.heap = []
        counter = itertools.count()

        def target():
            return (1.0 - rel_gap) * self.best_upper * self.o.factor

        def push(V):
            heapq.heappush(heap, _Cell(self.bound(V, target()), next(counter), V))

        for signs in itertools.product((1.0, -1.0), repeat=N - 1):
            push(np.diag(np.array((1.0,) + signs)))
        while True:
            cell = heap[0]
            if cell.lb >= target() or self.cells + 2 > max_cells or len(cell.vertices) < 2:
                break
            heapq.heappop(heap)
            V = cell.vertices
            J = len(V)
            i, j = max(((a, b) for a in range(J) for b in range(a + 1, J)),
                       key=lambda ab: np.abs(V[ab[0]] - V[ab[1]]).sum())
            mid = 0.5 * (V[i] + V[j])
            for drop in (i, j):
                U = V.copy()
                U[drop] = mid
                push(U)
        return max(heap[0].lb, 0.0)


# ---------------------------------------------------------------------------


def sigma_estimate(F, params: Optional[QCParams] = None, **overrides) -> QCReport:
    """Estimate ``sigma_p(F)`` and decide quasi-controllability.

    The verdict is ``"no"`` only with a verified invariant-subspace
    certificate, ``"yes"`` only when the certified lower bound exceeds
    ``params.threshold``, and ``"undetermined"`` otherwise.
    """
    F = as_family(F)
    params = _params(params, **overrides)
    N = F.N
    p = params.resolve_p(N)
    norm = params.norm
    tol = params.rank_tol
    flag = p < N - 1
    notes = ["exploratory: p < N-1, conclusions not covered by the theory"] if flag else []
    P = enumerate_products(F, p, params.dedup_tol, params.cap)
    PN = P if p >= N else enumerate_products(F, N, params.dedup_tol, params.cap)
    oracle = _RadiusOracle(P, norm, tol, params.ell2_resolution)

    found = find_invariant_subspace(F, p, tol, params.seed, products=PN)
    if found is not None:
        x, basis = found
        x = x / vector_norm(x, norm)
        notes.append(f"common invariant subspace of dimension {len(basis)}")
        return QCReport("no", oracle.value(x), 0.0, x, basis, "; ".join(notes), p, norm, flag,
                        evaluations=oracle.evaluations)

    # upper estimate: grid, then pattern search from the best grid points and
    # from seeded random starts
    grid = l1_sphere_grid(N, params.grid_for(N))
    if params.n_jobs > 1:
        with ThreadPoolExecutor(params.n_jobs) as pool:
            vals = np.array(list(pool.map(oracle.upper, grid)))
    else:
        vals = np.array([oracle.upper(x) for x in grid])
    order = np.argsort(vals, kind="stable")
    best_x, best = grid[order[0]], float(vals[order[0]])
    rng = np.random.default_rng(params.seed)
    starts = [grid[i] for i in order[:max(params.n_starts // 2, 1)]]
    starts += list(rng.normal(size=(params.n_starts - len(starts), N)))
    for s in starts:
        if not np.any(s):
            continue
        x, fx = _pattern_search(oracle.upper, np.asarray(s, dtype=float), norm)
        if fx < best:
            best_x, best = x, fx

    lip = max(_induced_norm_unchecked(R, norm) for R in P.matrices)
    lip_bound = None
    if norm == "ell1":
        # every point of the l1 sphere is within l1 distance N/res of the grid
        lip_bound = float(vals.min()) - lip * N / params.grid_for(N)

    lower = None
    cells = 0
    if params.certify and best * oracle.factor > params.threshold:
        cert = _Certifier(oracle)
        cert.best_upper, cert.best_x = best, best_x
        lower = cert.run(params.cells_for(N), params.rel_gap)
        best, best_x = cert.best_upper, cert.best_x
        cells = cert.cells
        if lip_bound is not None:
            lower = max(lower, lip_bound)
        lower = min(lower, best * oracle.factor)
    elif params.certify:
        # the upper estimate is already below the threshold
        lower = min(max(lip_bound or 0.0, 0.0), best * oracle.factor)
    elif lip_bound is not None:
        lower = max(lip_bound, 0.0)

    best_x = best_x / vector_norm(best_x, norm)
    sigma_upper = best
    if lower is not None and lower > params.threshold:
        verdict = "yes"
    else:
        verdict = "undetermined"
        found = find_invariant_subspace(F, p, tol, params.seed, extra=[best_x], products=PN)
        if found is not None:
            x, basis = found
            notes.append(f"common invariant subspace of dimension {len(basis)}")
            return QCReport("no", oracle.value(x / vector_norm(x, norm)), 0.0,
                            x / vector_norm(x, norm), basis, "; ".join(notes), p, norm, flag,
                            lip, lip_bound, cells, oracle.evaluations)
        notes.append("certified lower bound does not clear the threshold")
    if oracle.method != "exact":
        notes.append("ell2 balls handled through a direction net (lower bound)")
    return QCReport(verdict, sigma_upper, lower, best_x, None, "; ".join(notes), p, norm, flag,
                    lip, lip_bound, cells, oracle.evaluations)


@dataclass
class ScanRow:
    tau: float
    sigma_grid: float
    sigma_upper: float
    sigma_lower: Optional[float]
    verdict: str


@dataclass
class ScanTable:
    rows: list
    kappa: Optional[float]

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def continuity_scan(family_at: Callable[[float], MatrixFamily], taus: Sequence[float],
                    params: Optional[QCParams] = None, **overrides) -> ScanTable:
    """sigma_p along a one-parameter family ``tau -> F(tau)``.

    ``sigma_grid`` is evaluated on the same grid for every ``tau``;
    ``kappa`` is the smallest certified lower bound when all are positive.
    """
    params = _params(params, **overrides)
    rows = []
    for tau in taus:
        F = as_family(family_at(tau))
        p = params.resolve_p(F.N)
        rep = sigma_estimate(F, params)
        g = grid_sigma(F, p, params.norm, params.grid_resolution, params.rank_tol,
                       params.ell2_resolution)
        rows.append(ScanRow(float(tau), g, rep.sigma_upper, rep.sigma_lower, rep.verdict))
    lows = [r.sigma_lower for r in rows]
    kappa = min(lows) if lows and all(v is not None and v > 0 for v in lows) else None
    return ScanTable(rows, kappa)
