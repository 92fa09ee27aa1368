"""Absolute convex hulls ``absco(V) = co(V u -V)`` and the norm balls inside them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._validation import check_norm, check_vector
from .linalg import DEFAULT_RANK_TOL, rank
from .lp import LPProblem, lp_solve

ELLINF_VERTEX_CAP = 10
BASIS_ENUM_CAP = 5000


@dataclass(frozen=True)
class SymmetricPolytope:
    generators: np.ndarray

    def __init__(self, generators):
        G = np.array(generators, dtype=float)
        if G.ndim == 1:
            G = G[None, :]
        if G.ndim != 2 or G.shape[0] == 0:
            raise ValueError("a symmetric polytope needs a non-empty list of vectors")
        if not np.all(np.isfinite(G)):
            raise ValueError("generators must be finite")
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    @property
    def dim(self) -> int:
        return self.generators.shape[1]


@dataclass(frozen=True)
class BallContainment:
    radius: float
    direction: np.ndarray
    method: str = "exact"


def _as_polytope(P) -> SymmetricPolytope:
    return P if isinstance(P, SymmetricPolytope) else SymmetricPolytope(P)


def _reduce(G: np.ndarray) -> np.ndarray:
    # zero rows contribute nothing and v, -v give the same hull
    G = G[np.any(G != 0.0, axis=1)]
    if G.shape[0] <= 1:
        return G
    out = [G[0]]
    for v in G[1:]:
        S = np.asarray(out)
        if np.any(np.all(S == v, axis=1)) or np.any(np.all(S == -v, axis=1)):
            continue
        out.append(v)
    return np.asarray(out)


def _radius_lp(G: np.ndarray, d: np.ndarray) -> float:
    return radius_lp_coefficients(G, d)[0]


def radius_lp_coefficients(G: np.ndarray, d: np.ndarray):
    """Directional radius of ``absco(rows of G)`` along ``d`` and signed hull weights.

    Returns ``(t, theta)`` with ``G.T @ theta ~ t * d`` and ``sum |theta| <= 1``.
    No span pre-check is done; callers that need the exact-zero convention
    check the rank first.
    """
    # max t  s.t.  G^T (a - b) = t d,  sum(a + b) <= 1,  a, b, t >= 0
    Q, N = G.shape
    c = np.zeros(2 * Q + 1)
    c[-1] = 1.0
    A_eq = np.hstack([G.T, -G.T, -d[:, None]])
    A_ub = np.zeros((1, 2 * Q + 1))
    A_ub[0, :2 * Q] = 1.0
    res = lp_solve(LPProblem(c, A_eq, np.zeros(N), A_ub, np.ones(1), maximize=True))
    if res.status != "optimal":
        raise RuntimeError(f"membership LP ended with status {res.status}")
    theta = res.x[:Q] - res.x[Q:2 * Q]
    s = np.abs(theta).sum()
    if s > 1.0:
        theta = theta / s
    return max(res.optimum, 0.0), theta


@lru_cache(maxsize=64)
def _subsets(Q: int, N: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(Q), N)), dtype=int).reshape(-1, N)


def _nonsingular(B: np.ndarray) -> np.ndarray:
    scale = np.prod(np.linalg.norm(B, axis=-1), axis=-1)
    return np.abs(np.linalg.det(B)) > 1e-10 * scale


def directional_radii(G: np.ndarray, D: np.ndarray, hints=None, with_support: bool = False):
    """Directional radii of ``absco(rows of G)`` along every row of ``D``.

    Returns ``(t, theta)``: ``t[k]`` is the largest ``t`` with ``t D[k]`` in
    the hull and ``theta[k]`` signed weights with ``G.T @ theta[k] ~ t[k] D[k]``
    and ``sum |theta[k]| <= 1``.  With free signs the optimum of the membership
    LP sits on a basis of ``N`` rows, so when there are few enough row
    subsets they are all solved at once; otherwise the LP is used per row.
    Rank-deficient ``G`` gives zeros.

    ``hints`` (candidate bases of ``N`` row indices per direction, shape
    ``(K, H, N)``, e.g. from nearby points) are tried first: a basis is
    accepted when its dual solution ``y`` (``g_q . y = sign theta_q`` on the
    basis) satisfies ``|G y| <= 1``, which proves optimality.  With
    ``with_support`` the bases used are returned as a third item (``-1``
    rows when none).
    """
    G = np.asarray(G, dtype=float)
    D = np.atleast_2d(np.asarray(D, dtype=float))
    Q, N = G.shape
    K = D.shape[0]
    t = np.zeros(K)
    theta = np.zeros((K, Q))
    support = np.full((K, N), -1, dtype=int)
    out = (t, theta, support) if with_support else (t, theta)
    if Q < N:
        return out
    todo = np.arange(K)
    if hints is not None and np.size(hints):
        H = np.asarray(hints, dtype=int).reshape(K, -1, N)
        valid = np.all(H >= 0, axis=2)
        B = G[np.where(valid[..., None], H, 0)]              # (K, h, N, N)
        valid &= _nonsingular(B)
        B = np.where(valid[..., None, None], B, np.eye(N))
        rhs = np.broadcast_to(D[:, None, :, None], B.shape[:2] + (N, 1))
        sol = np.linalg.solve(B.transpose(0, 1, 3, 2), rhs)[..., 0]
        sgn = np.sign(sol)
        y = np.linalg.solve(B, sgn[..., None])[..., 0]
        dual = np.abs(np.einsum("qn,khn->khq", G, y)).max(axis=2)
        good = valid & np.all(sgn != 0.0, axis=2) & (dual <= 1.0 + 1e-10)
        done = []
        for k in range(K):
            hit = np.flatnonzero(good[k])
            if hit.size:
                j = hit[0]
                t[k] = 1.0 / np.abs(sol[k, j]).sum()
                theta[k, H[k, j]] = sol[k, j] * t[k]
                support[k] = H[k, j]
                done.append(k)
        todo = np.setdiff1d(todo, done)
        if todo.size == 0:
            return out
    if math.comb(Q, N) > BASIS_ENUM_CAP:
        for k in todo:
            t[k], theta[k] = radius_lp_coefficients(G, D[k])
        return out
    S = _subsets(Q, N)
    B = G[S]                                        # (C, N, N), rows g_q
    ok = _nonsingular(B)
    if not ok.any():
        return out
    S, B = S[ok], B[ok]
    Dt = D[todo]
    sol = np.linalg.solve(B.transpose(0, 2, 1), np.broadcast_to(Dt.T, (len(B), N, len(todo))))
    l1 = np.abs(sol).sum(axis=1)                   # (C', K')
    best = l1.argmin(axis=0)
    for j, k in enumerate(todo):
        c = best[j]
        t[k] = 1.0 / l1[c, j]
        theta[k, S[c]] = sol[c, :, j] * t[k]
        support[k] = S[c]
    return out


def directional_radius(P, d, tol: float = DEFAULT_RANK_TOL) -> float:
    """Largest ``t >= 0`` with ``t * d`` in ``absco(P)``; 0 when ``d`` leaves the span."""
    P = _as_polytope(P)
    d = check_vector(d, P.dim, "direction")
    if not np.any(d):
        raise ValueError("direction must be nonzero")
    G = _reduce(P.generators)
    if G.shape[0] == 0:
        return 0.0
    r = rank(list(G), tol)
    if rank(list(G) + [d], tol) > r:
        return 0.0
    return _radius_lp(G, d)


def ball_directions(norm: str, N: int, ell2_resolution: int = 32):
    """Directions whose radii determine (or bound) the inscribed ball.

    Returns ``(D, factor, method)``: the ball radius is at least
    ``factor * min_d directional_radius(d)``, with equality for polytope norms.
    Opposite directions are left out because absolute convex hulls are
    symmetric.
    """
    norm = check_norm(norm)
    if norm == "ell1":
        return np.eye(N), 1.0, "exact"
    if norm == "ellinf":
        if N > ELLINF_VERTEX_CAP:
            raise ValueError(
                f"ellinf containment needs 2^(N-1) vertex LPs; N={N} exceeds the cap "
                f"{ELLINF_VERTEX_CAP}; use ell1 instead")
        signs = [(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=N - 1)]
        return np.array(signs), 1.0, "exact"
    # ell2: a net of unit directions with a known angular covering radius
    if N == 1:
        return np.ones((1, 1)), 1.0, "exact"
    if N == 2:
        K = max(int(ell2_resolution), 4)
        ang = np.pi * np.arange(K) / K
        D = np.column_stack([np.cos(ang), np.sin(ang)])
        return D, math.cos(np.pi / (2 * K)), "net_lower_bound"
    # lattice points on the faces of the cube [-1, 1]^N, spacing h
    res = max(int(ell2_resolution) // 4, 2)
    ticks = np.linspace(-1.0, 1.0, res + 1)
    pts = set()
    for axis in range(N):
        for rest in itertools.product(ticks, repeat=N - 1):
            p = list(rest)
            p.insert(axis, 1.0)
            p = np.array(p)
            first = p[np.flatnonzero(p)[0]]
            pts.add(tuple(np.round(p * np.sign(first), 15)))
    D = np.array(sorted(pts))
    D /= np.linalg.norm(D, axis=1)[:, None]
    h = 2.0 / res
    s = min(1.0, h * math.sqrt(N - 1) / 2.0)
    return D, math.cos(math.asin(s)), "net_lower_bound"


def inscribed_radius(P, norm="ell1", tol: float = DEFAULT_RANK_TOL,
                     ell2_resolution: int = 32) -> BallContainment:
    """Radius of the largest ``norm`` ball centred at 0 inside ``absco(P)``.

    Exact for ell1 (ball vertices +-e_j) and for ellinf (the 2^(N-1) sign
    vertices).  For ell2 the result is a lower bound from a direction net,
    tagged ``method="net_lower_bound"``.
    """
    P = _as_polytope(P)
    N = P.dim
    D, factor, method = ball_directions(norm, N, ell2_resolution)
    G = _reduce(P.generators)
    if G.shape[0] == 0 or rank(list(G), tol) < N:
        return BallContainment(0.0, D[0].copy(), method)
    radii = np.array([_radius_lp(G, d) for d in D])
    j = int(np.argmin(radii))
    return BallContainment(float(factor * radii[j]), D[j].copy(), method)
