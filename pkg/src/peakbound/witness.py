"""Constructive instability: expanding products and exponential-growth witnesses.

If some product ``R`` and vector ``x*`` satisfy ``||R x*|| * s > mu ||x*||``
with ``mu > 1`` and ``s`` a certified lower bound on sigma_p, then for every
nonzero ``x`` there is ``L`` in ``F_p`` with ``||R L x|| >= mu ||x||``
(the inscribed ball of ``absco(F_p(x))`` reaches a multiple of ``x*``).
Chaining such steps from any start gives geometric growth along an explicit
switching sequence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from ._validation import check_norm, check_vector
from .exceptions import CertificateViolation
from .linalg import vector_norm
from .qc import QCParams, _params, l1_sphere_grid, sigma_estimate
from .semigroup import MatrixFamily, ProductSet, as_family, enumerate_products

REPLAY_SLACK = 1e-9


@dataclass(frozen=True)
class ExpansionSeed:
    word: tuple
    x: np.ndarray
    mu: float
    sigma_lower: float


@dataclass(frozen=True)
class ExpansionStep:
    """One block ``R L``: ``ratio = ||R L x|| / ||x||`` with ``L`` from ``F_p``."""

    word: tuple       # word of R L (product order)
    inner_word: tuple  # word of L
    ratio: float


@dataclass
class InstabilityWitness:
    schedule: List[int]          # member applied at step n
    kappa: float
    lam: float
    x0: np.ndarray
    trajectory: np.ndarray = field(repr=False)
    horizon: int = 0
    checkpoints: List[int] = field(default_factory=list)
    block_bound: int = 0         # K = |seed word| + p
    seed: Optional[ExpansionSeed] = None
    norm: str = "ell1"

    @property
    def growth(self) -> np.ndarray:
        n0 = vector_norm(self.trajectory[0], self.norm)
        return np.array([vector_norm(v, self.norm) for v in self.trajectory]) / n0

    def to_dict(self) -> dict:
        return {
            "schedule": [int(i) for i in self.schedule],
            "kappa": {"value": self.kappa, "method": "certified"},
            "lambda": {"value": self.lam, "method": "certified"},
            "x0": [float(v) for v in self.x0],
            "horizon": self.horizon,
            "checkpoints": list(self.checkpoints),
            "block_bound": self.block_bound,
            "seed": None if self.seed is None else {
                "word": list(self.seed.word), "x": self.seed.x.tolist(),
                "mu": self.seed.mu, "sigma_lower": self.seed.sigma_lower},
            "norm": self.norm,
            "growth": self.growth.tolist(),
        }


def _maximizing_direction(R: np.ndarray, norm: str) -> np.ndarray:
    if norm == "ell1":
        j = int(np.argmax(np.abs(R).sum(axis=0)))
        x = np.zeros(R.shape[1])
        x[j] = 1.0
        return x
    if norm == "ellinf":
        i = int(np.argmax(np.abs(R).sum(axis=1)))
        x = np.where(R[i] >= 0, 1.0, -1.0)
        return x
    _, _, Vt = np.linalg.svd(R)
    return Vt[0]


def find_expanding_seed(F, p: int, sigma_lower: float, depth: int, norm="ell1",
                        grid_resolution: int = 8, cap: Optional[int] = None) -> Optional[ExpansionSeed]:
    """Best ``(R, x*)`` with ``mu = ||R x*|| * sigma_lower / ||x*|| > 1``.

    Candidates are all products up to ``depth`` and, for each, the grid on
    the unit l1 sphere plus the direction where ``||R||`` is attained.
    ``p`` is recorded for the caller; the search itself does not use it.
    """
    F = as_family(F)
    norm = check_norm(norm)
    if sigma_lower <= 0:
        raise ValueError("sigma_lower must be positive")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    P = enumerate_products(F, depth, cap=cap)
    grid = l1_sphere_grid(F.N, grid_resolution)
    grid = grid / np.array([vector_norm(g, norm) for g in grid])[:, None]
    best = None
    for w, R in zip(P.words, P.matrices):
        if not w:
            continue
        cands = np.vstack([grid, _maximizing_direction(R, norm)[None, :]])
        imgs = cands @ R.T
        if norm == "ell1":
            gains = np.abs(imgs).sum(axis=1) / np.abs(cands).sum(axis=1)
        elif norm == "ellinf":
            gains = np.abs(imgs).max(axis=1) / np.abs(cands).max(axis=1)
        else:
            gains = np.linalg.norm(imgs, axis=1) / np.linalg.norm(cands, axis=1)
        k = int(np.argmax(gains))
        mu = float(gains[k]) * sigma_lower
        if mu > 1.0 and (best is None or mu > best.mu):
            x = cands[k] / vector_norm(cands[k], norm)
            best = ExpansionSeed(tuple(w), x, mu, float(sigma_lower))
    return best


def expansion_step(Fp: ProductSet, R: np.ndarray, x, mu: float, norm="ell1",
                   R_word: tuple = ()) -> ExpansionStep:
    """Pick ``L`` in ``F_p`` maximizing ``||R L x|| / ||x||``.

    Raises ``CertificateViolation`` if even the best ratio is below ``mu``,
    which can only happen when the sigma lower bound behind ``mu`` is wrong.
    """
    norm = check_norm(norm)
    x = check_vector(x, R.shape[0], "x", nonzero=True)
    imgs = (Fp.matrices @ x) @ R.T
    if norm == "ell1":
        norms = np.abs(imgs).sum(axis=1)
    elif norm == "ellinf":
        norms = np.abs(imgs).max(axis=1)
    else:
        norms = np.linalg.norm(imgs, axis=1)
    q = int(np.argmax(norms))
    ratio = float(norms[q]) / vector_norm(x, norm)
    if ratio < mu:
        raise CertificateViolation(
            f"best expansion ratio {ratio:.12g} is below mu={mu:.12g}; "
            "the sigma lower bound used for the seed is not valid",
            ratio=ratio, mu=mu, x=x, R=R)
    return ExpansionStep(tuple(R_word) + tuple(Fp.words[q]), tuple(Fp.words[q]), ratio)


def replay(F, schedule: Sequence[int], x0) -> np.ndarray:
    """Trajectory of ``x(n+1) = A_{s(n)} x(n)`` from the schedule alone."""
    F = as_family(F)
    x = check_vector(x0, F.N, "x0")
    out = np.empty((len(schedule) + 1, F.N))
    out[0] = x
    for n, i in enumerate(schedule):
        x = F.members[i] @ x
        out[n + 1] = x
    return out


def verify_witness(F, w: InstabilityWitness) -> bool:
    traj = replay(F, w.schedule, w.x0)
    n0 = vector_norm(w.x0, w.norm)
    for n, v in enumerate(traj):
        if vector_norm(v, w.norm) < w.kappa * w.lam ** n * n0 * (1.0 - REPLAY_SLACK):
            return False
    gaps = np.diff([0] + list(w.checkpoints))
    return bool(np.all(gaps <= w.block_bound))


@dataclass
class WitnessOutcome:
    witness: Optional[InstabilityWitness]
    diagnostic: str = ""


def build_witness(F, p: Optional[int], x0, horizon: int, params: Optional[QCParams] = None,
                  depth: int = 8, sigma_lower: Optional[float] = None) -> WitnessOutcome:
    """Assemble and verify a switching sequence with ``||x(n)|| >= kappa lam^n ||x(0)||``.

    ``lam`` is the smallest per-step growth rate seen at block ends,
    ``min_m g(q_m)^(1/q_m)``, and ``kappa = min_n g(n) / lam^n`` over the whole
    horizon, both from the recorded norms ``g``.  The witness is returned
    only after an independent replay confirms the estimate at every step.
    """
    F = as_family(F)
    params = _params(params, **({} if p is None else {"p": p}))
    norm = params.norm
    N = F.N
    p = params.resolve_p(N)
    x0 = check_vector(x0, N, "x0", nonzero=True)
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if sigma_lower is None:
        rep = sigma_estimate(F, params)
        if rep.verdict != "yes":
            return WitnessOutcome(None, f"family is not certified quasi-controllable ({rep.verdict})")
        sigma_lower = rep.sigma_lower
    seed = find_expanding_seed(F, p, sigma_lower, depth, norm, cap=params.cap)
    if seed is None:
        return WitnessOutcome(None, f"no expanding product up to depth {depth}")
    R = F.word_matrix(seed.word)
    Fp = enumerate_products(F, p, params.dedup_tol, params.cap)
    K = len(seed.word) + p

    schedule: List[int] = []
    checkpoints: List[int] = []
    x = x0.copy()
    while len(schedule) < horizon:
        step = expansion_step(Fp, R, x, seed.mu, norm, seed.word)
        letters = list(reversed(step.word))  # the last factor acts first
        for i in letters:
            x = F.members[i] @ x
        schedule += letters
        checkpoints.append(len(schedule))
    schedule = schedule[:horizon]
    traj = replay(F, schedule, x0)
    g = np.array([vector_norm(v, norm) for v in traj]) / vector_norm(x0, norm)
    marks = [q for q in checkpoints if q <= horizon]
    if not marks:
        return WitnessOutcome(None, "horizon shorter than the first expansion block")
    lam = min(g[q] ** (1.0 / q) for q in marks)
    if not lam > 1.0:
        return WitnessOutcome(None, f"recorded growth rate {lam:.6g} is not above 1")
    n = np.arange(len(g))
    kappa = float(np.min(g / lam ** n))
    w = InstabilityWitness(schedule, kappa, float(lam), x0, traj, horizon, marks, K, seed, norm)
    if not verify_witness(F, w):
        return WitnessOutcome(None, "replay verification failed")
    return WitnessOutcome(w, f"verified over {horizon} steps")


@dataclass
class RobustnessRow:
    tau: float
    verdict: str
    witness_found: bool
    lam: Optional[float]
    diagnostic: str = ""


def robustness_scan(family_at: Callable[[float], MatrixFamily], taus: Sequence[float],
                    params: Optional[QCParams] = None, horizon: int = 100,
                    depth: int = 8, x0=None) -> List[RobustnessRow]:
    """Try to build a witness for each ``F(tau)``."""
    params = _params(params)
    rows = []
    for tau in taus:
        F = as_family(family_at(tau))
        start = np.ones(F.N) if x0 is None else x0
        rep = sigma_estimate(F, params)
        if rep.verdict != "yes":
            rows.append(RobustnessRow(float(tau), rep.verdict, False, None,
                                      "not certified quasi-controllable"))
            continue
        out = build_witness(F, None, start, horizon, params, depth, rep.sigma_lower)
        w = out.witness
        rows.append(RobustnessRow(float(tau), rep.verdict, w is not None,
                                  None if w is None else w.lam, out.diagnostic))
    return rows
