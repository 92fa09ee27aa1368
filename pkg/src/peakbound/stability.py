"""Absolute stability certificates and bounds on the overshooting measure.

The overshooting measure ``chi(F)`` of a family is the supremum of induced
norms over all finite products of its members.  Lower bounds come from a
product search, upper bounds from a certified sigma lower bound (``1/s``) or
directly from a stability certificate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ._validation import check_matrix, check_norm, check_square, check_vector
from .exceptions import ProductCapError
from .geometry import directional_radius
from .linalg import _induced_norm_unchecked, vector_norm
from .qc import QCParams, QCReport, _params, sigma_estimate
from .semigroup import DEFAULT_DEDUP_TOL, MatrixFamily, as_family, product_cap

POLYTOPE_VERTEX_CAP = 400
_GAUGE_TOL = 1e-10


@dataclass(frozen=True)
class StabilityCertificate:
    """Evidence that every product of the family stays bounded.

    ``method="contraction"``: all products of length ``k`` have induced norm
    at most ``q < 1`` and ``mu`` is the largest norm of a shorter product,
    so ``chi(F) = mu`` (every product splits into a short head and
    contracting blocks).

    ``method="invariant_polytope"``: ``absco(vertices)`` contains the unit
    ball and is mapped into itself by every member (``q`` is the largest
    gauge of an image vertex, at most ``1`` up to LP tolerance); ``mu`` is
    the largest vertex norm and bounds ``chi(F)``.  ``k`` is the number of
    growth rounds used.
    """

    k: int
    q: float
    mu: float
    method: str = "contraction"
    norm: str = "ell1"
    vertices: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def chi_bound(self) -> float:
        return self.mu

    def to_dict(self) -> dict:
        out = {"k": self.k, "q": self.q, "mu": self.mu, "method": self.method, "norm": self.norm}
        if self.vertices is not None:
            out["vertices"] = self.vertices.tolist()
        return out


def _level_products(F: MatrixFamily, k: int, cap: int):
    """Distinct products of exactly 1..k factors, level by level."""
    level = [np.eye(F.N)]
    made = 0
    for _ in range(k):
        nxt = []
        for P in level:
            for A in F.members:
                made += 1
                if made > cap:
                    raise ProductCapError(
                        f"more than {cap} products needed; raise the cap or lower kmax")
                X = A @ P
                if not any(np.max(np.abs(X - Y)) <= DEFAULT_DEDUP_TOL for Y in nxt):
                    nxt.append(X)
        level = nxt
        yield level


def _contraction(F: MatrixFamily, kmax: int, norm: str, cap: int) -> Optional[StabilityCertificate]:
    mu = 1.0
    for k, level in enumerate(_level_products(F, kmax, cap), start=1):
        q = max(_induced_norm_unchecked(P, norm) for P in level)
        if q < 1.0:
            return StabilityCertificate(k, q, mu, "contraction", norm)
        mu = max(mu, q)
    return None


def _unit_ball_vertices(norm: str, N: int) -> np.ndarray:
    if norm == "ell1":
        return np.eye(N)
    if norm == "ellinf":
        from itertools import product
        return np.array([(1.0,) + s for s in product((1.0, -1.0), repeat=N - 1)])
    # the unit l2 ball sits inside the l1 ball of radius sqrt(N)
    return math.sqrt(N) * np.eye(N)


def _invariant_polytope(F: MatrixFamily, rounds: int, norm: str) -> Optional[StabilityCertificate]:
    V = [v for v in _unit_ball_vertices(norm, F.N)]
    frontier = list(V)
    for r in range(1, rounds + 1):
        added = []
        for v in frontier:
            for A in F.members:
                w = A @ v
                if not np.any(w):
                    continue
                if directional_radius(np.array(V + added), w) >= 1.0 - _GAUGE_TOL:
                    continue
                added.append(w)
                if len(V) + len(added) > POLYTOPE_VERTEX_CAP:
                    return None
        if not added:
            P = np.array(V)
            q = 0.0
            for v in V:
                for A in F.members:
                    w = A @ v
                    if np.any(w):
                        q = max(q, 1.0 / directional_radius(P, w))
            mu = max(vector_norm(v, norm) for v in V)
            return StabilityCertificate(r, q, mu, "invariant_polytope", norm, P)
        V += added
        frontier = added
    return None


def stability_certificate(F, kmax: int = 8, norm="ell1", cap: Optional[int] = None,
                          polytope: bool = True) -> Optional[StabilityCertificate]:
    """Search for a finite certificate of Lyapunov absolute stability.

    First looks for the smallest ``k <= kmax`` at which every length-``k``
    product contracts.  Families with a member that has eigenvalue 1 (for
    instance i-mixtures, where all but one row are identity rows) can never
    pass that test, so an invariant polytope grown from the unit ball for up
    to ``kmax`` rounds is tried next.  ``None`` means unknown, not unstable.
    """
    F = as_family(F)
    norm = check_norm(norm)
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    cert = _contraction(F, kmax, norm, product_cap(cap))
    if cert is None and polytope:
        cert = _invariant_polytope(F, kmax, norm)
    return cert


# ---------------------------------------------------------------------------
# lower bounds on chi by product search


def _growth_table(F: MatrixFamily, depth: int, norm: str, budget: int = 4096,
                  ceiling: Optional[float] = None) -> np.ndarray:
    """``G[r] >= max ||W||`` over products ``W`` of at most ``r`` factors.

    Exact for small ``r`` (full enumeration within ``budget`` products), then
    extended by submultiplicativity.
    """
    G = [1.0]
    level = [np.eye(F.N)]
    spent = 0
    while len(G) <= depth and spent + len(level) * F.M <= budget:
        level = [A @ P for P in level for A in F.members]
        spent += len(level)
        G.append(max(G[-1], max(_induced_norm_unchecked(P, norm) for P in level)))
    j0 = len(G) - 1
    while len(G) <= depth:
        r = len(G)
        if j0 == 0:
            G.append(max(_induced_norm_unchecked(A, norm) for A in F.members) * G[r - 1])
        else:
            G.append(min(G[a] * G[r - a] for a in range(1, j0 + 1)))
    G = np.maximum.accumulate(np.asarray(G))
    # a bound for longer words is also a bound for shorter ones
    G = np.minimum.accumulate(G[::-1])[::-1]
    if ceiling is not None:
        G = np.minimum(G, max(ceiling, 1.0))
    return G


def chi_lower(F, depth: int, norm="ell1", prune: bool = True,
              certificate: Optional[StabilityCertificate] = None,
              cap: Optional[int] = None) -> Tuple[float, tuple]:
    """Largest induced norm over products of at most ``depth`` factors.

    Returns ``(bound, word)``.  Words grow on the left (``A_i @ P``), depth
    first.  With ``prune`` a branch is dropped once its norm times an upper
    bound on the growth still available cannot beat the incumbent; the
    result is the same number as the exhaustive search (``prune=False``).
    ``cap`` limits the number of visited products.
    """
    F = as_family(F)
    norm = check_norm(norm)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    limit = product_cap(cap)
    best, best_word = 1.0, ()
    if depth == 0:
        return best, best_word
    ceiling = None
    if certificate is not None and certificate.norm == norm:
        ceiling = certificate.mu
    G = _growth_table(F, depth, norm, ceiling=ceiling) if prune else None
    members = F.members
    visited = 0
    stack = [(np.eye(F.N), ())]
    while stack:
        P, w = stack.pop()
        for i in range(len(members) - 1, -1, -1):
            X = members[i] @ P
            word = (i,) + w
            visited += 1
            if visited > limit:
                raise ProductCapError(
                    f"chi search visited more than {limit} products at depth {depth}; "
                    "raise the cap or lower the depth")
            v = _induced_norm_unchecked(X, norm)
            if v > best:
                best, best_word = v, word
            rest = depth - len(word)
            if rest == 0:
                continue
            if prune and v * G[rest] * (1.0 + 1e-12) <= best:
                continue
            stack.append((X, word))
    return best, best_word


def chi_upper(F, params: Optional[QCParams] = None, kmax: int = 8,
              report: Optional[QCReport] = None,
              certificate: Optional[StabilityCertificate] = None) -> Tuple[Optional[float], str]:
    """``1/s`` for a certified sigma lower bound ``s`` of a stable family.

    Both hypotheses are checked: a quasi-controllability verdict of ``yes``
    with ``s > 0``, and a stability certificate.  Returns ``(None, reason)``
    when either fails.
    """
    F = as_family(F)
    params = _params(params)
    rep = report if report is not None else sigma_estimate(F, params)
    if rep.verdict != "yes" or not rep.sigma_lower or rep.sigma_lower <= 0:
        return None, f"not quasi-controllable (verdict {rep.verdict})"
    cert = certificate if certificate is not None else stability_certificate(F, kmax, params.norm, params.cap)
    if cert is None:
        return None, f"no stability certificate within kmax={kmax}"
    return 1.0 / rep.sigma_lower, "certified: stable and quasi-controllable"


@dataclass
class PeakReport:
    chi_lower: float
    chi_upper: Optional[float]
    depth: int
    stability: str  # "certified stable" | "certified unstable" | "unknown"
    provenance: str
    word: tuple = ()
    certificate: Optional[StabilityCertificate] = None
    qc: Optional[QCReport] = None

    @property
    def certificate_bound(self) -> Optional[float]:
        return None if self.certificate is None else self.certificate.mu

    def to_dict(self) -> dict:
        return {
            "chi_lower": {"value": self.chi_lower, "method": "certified",
                          "word": list(self.word)},
            "chi_upper": {"value": self.chi_upper, "method": "certified",
                          "provenance": self.provenance},
            "certificate_bound": {"value": self.certificate_bound, "method": "certified"},
            "depth": self.depth,
            "stability": self.stability,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "qc": None if self.qc is None else self.qc.to_dict(),
        }


def peak_report(F, depth: int, params: Optional[QCParams] = None, kmax: int = 8,
                prune: bool = True) -> PeakReport:
    F = as_family(F)
    params = _params(params)
    cert = stability_certificate(F, kmax, params.norm, params.cap)
    low, word = chi_lower(F, depth, params.norm, prune, cert, params.cap)
    rep = sigma_estimate(F, params)
    up, reason = chi_upper(F, params, kmax, rep, cert)
    if cert is not None:
        stability = "certified stable"
    elif rep.verdict == "yes" and rep.sigma_lower and low * rep.sigma_lower > 1.0:
        # a product beating 1/sigma is impossible for stable families
        stability = "certified unstable"
        reason += "; a product norm exceeds 1/sigma_lower, so the family is unstable"
    else:
        stability = "unknown"
    return PeakReport(low, up, depth, stability, reason, word, cert, rep)


# ---------------------------------------------------------------------------
# circle-criterion feedback family


@dataclass
class FrequencyCheck:
    family: MatrixFamily
    holds: bool
    max_gain: float
    margin: float
    argmax_angle: float
    diagnostic: str = ""


def _transfer(A: np.ndarray, b: np.ndarray, c: np.ndarray, theta: np.ndarray):
    N = A.shape[0]
    z = np.exp(1j * np.asarray(theta, dtype=float))
    M = z[:, None, None] * np.eye(N) - A[None, :, :]
    cond = np.linalg.cond(M)
    vals = np.full(z.shape, np.inf)
    ok = cond < 1e12
    if np.any(ok):
        sol = np.linalg.solve(M[ok], np.broadcast_to(b.astype(complex), (int(ok.sum()), N))[..., None])
        vals[ok] = np.abs(sol[..., 0] @ c)
    return vals, cond


def circle_feedback_family(A, b, c, gamma: float, samples: int = 4096,
                           scale_by_gamma: bool = False) -> FrequencyCheck:
    """Build ``{A - gamma b c^T, A + gamma b c^T}`` and check the frequency condition.

    The condition is ``max |c^T (wI - A)^-1 b| < 1`` over the unit circle,
    sampled at ``samples`` points and refined around the largest samples.
    With ``scale_by_gamma`` the gain is multiplied by ``|gamma|``.
    """
    A = check_square(A, "A")
    N = A.shape[0]
    b = check_vector(b, N, "b")
    c = check_vector(c, N, "c")
    if samples < 8:
        raise ValueError("samples must be at least 8")
    g = abs(float(gamma))
    K = np.outer(b, c)
    members = [A - g * K, A + g * K]
    if g == 0.0 or np.array_equal(members[0], members[1]):
        members = members[:1]
    fam = MatrixFamily(members)

    theta = 2.0 * np.pi * np.arange(samples) / samples
    vals, cond = _transfer(A, b, c, theta)
    if not np.all(np.isfinite(vals)):
        bad = theta[~np.isfinite(vals)][0]
        return FrequencyCheck(fam, False, math.inf, -math.inf, float(bad),
                              f"wI - A is numerically singular at angle {bad:.6g} "
                              "(an eigenvalue of A lies on the unit circle)")
    # refine around the few largest local maxima
    h = 2.0 * np.pi / samples
    peaks = [i for i in np.argsort(vals)[::-1][:8]]
    best_v, best_t = float(vals.max()), float(theta[int(vals.argmax())])
    for i in peaks:
        lo, hi = theta[i] - h, theta[i] + h
        for _ in range(4):
            fine = np.linspace(lo, hi, 33)
            fv, _ = _transfer(A, b, c, fine)
            j = int(np.argmax(fv))
            if not np.isfinite(fv[j]):
                return FrequencyCheck(fam, False, math.inf, -math.inf, float(fine[j]),
                                      "wI - A is numerically singular near the unit circle")
            if fv[j] > best_v:
                best_v, best_t = float(fv[j]), float(fine[j])
            step = (hi - lo) / 32
            lo, hi = fine[j] - step, fine[j] + step
    gain = best_v * (g if scale_by_gamma else 1.0)
    return FrequencyCheck(fam, gain < 1.0, gain, 1.0 - gain, best_t)
