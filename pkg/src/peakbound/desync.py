"""Desynchronized iterations: one coordinate of ``x <- A x`` updated per step.

Updating coordinate ``i`` only is the same as applying the i-mixture of
``A``: row ``i`` taken from ``A``, every other row from the identity.  The
state after a schedule is therefore a product of mixtures, and the mixture
family's overshooting measure bounds every schedule at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from ._validation import check_norm, check_square, check_vector
from .exceptions import ScheduleExhausted
from .linalg import DEFAULT_RANK_TOL, min_gain, rank, vector_norm
from .semigroup import MatrixFamily
from .stability import StabilityCertificate, stability_certificate


class Bound(NamedTuple):
    value: Optional[float]
    reason: str
    certificate: Optional[StabilityCertificate] = None


def mixture(A, i: int) -> np.ndarray:
    A = check_square(A, "A")
    B = np.eye(A.shape[0])
    B[i] = A[i]
    return B


class MixtureFamily(MatrixFamily):
    """The N mixtures of a square matrix, with the constants of the sigma bound."""

    def __init__(self, A, norm="ell1", tol: float = DEFAULT_RANK_TOL):
        A = check_square(A, "A")
        super().__init__([mixture(A, i) for i in range(A.shape[0])],
                         labels=[f"mix{i}" for i in range(A.shape[0])])
        self.base = A.copy()
        self.base.setflags(write=False)
        self.alpha = alpha(A, norm, tol)
        self.beta = beta(A)
        self.beta_applicable = has_off_diagonal(A)
        self.irreducible = is_irreducible(A)
        b = mixture_sigma_bound(A, norm, tol)
        self.bound = b.value
        self.bound_reason = b.reason

    def __repr__(self):
        return f"MixtureFamily(N={self.N}, alpha={self.alpha:.6g}, beta={self.beta:.6g})"


def mixtures(A, norm="ell1", tol: float = DEFAULT_RANK_TOL) -> MixtureFamily:
    return MixtureFamily(A, norm, tol)


def is_irreducible(A) -> bool:
    """Strong connectivity of the off-diagonal nonzero pattern."""
    A = check_square(A, "A")
    N = A.shape[0]
    if N == 1:
        return True
    pattern = (A != 0.0) & ~np.eye(N, dtype=bool)
    n, _ = connected_components(pattern.astype(int), directed=True, connection="strong")
    return n == 1


def has_off_diagonal(A) -> bool:
    A = check_square(A, "A")
    return bool(np.any(A[~np.eye(A.shape[0], dtype=bool)] != 0.0))


def alpha(A, norm="ell1", tol: float = DEFAULT_RANK_TOL) -> float:
    """``min ||(A - I) x|| / (2N)`` over the unit sphere; 0 when 1 is an eigenvalue."""
    A = check_square(A, "A")
    N = A.shape[0]
    return min_gain(A - np.eye(N), norm, tol) / (2 * N)


def beta(A) -> float:
    """Half the smallest nonzero off-diagonal magnitude (0 if there is none)."""
    A = check_square(A, "A")
    off = np.abs(A[~np.eye(A.shape[0], dtype=bool)])
    off = off[off > 0]
    return float(off.min()) / 2.0 if off.size else 0.0


def mixture_sigma_bound(A, norm="ell1", tol: float = DEFAULT_RANK_TOL) -> Bound:
    """``alpha * beta^(N-1)``, a lower bound for sigma_N of the mixture family.

    Needs ``A`` irreducible and ``A - I`` nonsingular; otherwise the value is
    ``None`` and the reason names every failed condition.
    """
    A = check_square(A, "A")
    N = A.shape[0]
    failed = []
    if not is_irreducible(A):
        failed.append("A is reducible")
    if rank(list(A - np.eye(N)), tol) < N:
        failed.append("1 is an eigenvalue of A")
    if failed:
        return Bound(None, "; ".join(failed))
    return Bound(alpha(A, norm, tol) * beta(A) ** (N - 1), "irreducible, A - I nonsingular")


def desync_peak_bound(A, kmax: int = 8, norm="ell1", tol: float = DEFAULT_RANK_TOL) -> Bound:
    """``1 / (alpha beta^(N-1))`` when the mixture family is certified stable."""
    A = check_square(A, "A")
    low = mixture_sigma_bound(A, norm, tol)
    if low.value is None:
        return low
    cert = stability_certificate(MixtureFamily(A, norm, tol), kmax, norm)
    if cert is None:
        return Bound(None, f"no stability certificate for the mixtures within kmax={kmax}")
    return Bound(1.0 / low.value, f"stable ({cert.method}, k={cert.k}) and {low.reason}", cert)


# ---------------------------------------------------------------------------
# schedules and simulation


class Schedule:
    """Update indices ``i(0), i(1), ...`` (0-based)."""

    def take(self, T: int, N: int) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitSchedule(Schedule):
    indices: tuple

    def __init__(self, indices: Sequence[int]):
        object.__setattr__(self, "indices", tuple(int(i) for i in indices))

    def take(self, T, N):
        if len(self.indices) < T:
            raise ScheduleExhausted(
                f"schedule has {len(self.indices)} entries, {T} steps requested")
        out = np.asarray(self.indices[:T], dtype=int)
        if out.size and (out.min() < 0 or out.max() >= N):
            raise ValueError(f"schedule indices must lie in 0..{N - 1}")
        return out

    def to_dict(self):
        return {"kind": "explicit", "indices": list(self.indices)}


@dataclass(frozen=True)
class RoundRobin(Schedule):
    start: int = 0

    def take(self, T, N):
        return (self.start + np.arange(T)) % N

    def to_dict(self):
        return {"kind": "round_robin", "start": self.start}


@dataclass(frozen=True)
class RandomSchedule(Schedule):
    seed: int = 0

    def take(self, T, N):
        return np.random.default_rng(self.seed).integers(0, N, size=T)

    def to_dict(self):
        return {"kind": "random", "seed": self.seed}


def schedule_from_dict(spec: dict) -> Schedule:
    kind = spec.get("kind")
    if kind == "explicit":
        return ExplicitSchedule(spec["indices"])
    if kind == "round_robin":
        return RoundRobin(int(spec.get("start", 0)))
    if kind == "random":
        return RandomSchedule(int(spec.get("seed", 0)))
    raise ValueError(f"unknown schedule kind {kind!r}")


@dataclass(frozen=True)
class DesyncModel:
    A: np.ndarray
    schedule: Schedule

    def __post_init__(self):
        A = check_square(self.A, "A")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def N(self) -> int:
        return self.A.shape[0]


@dataclass
class Simulation:
    trajectory: np.ndarray  # (T + 1, N)
    schedule: np.ndarray
    peak_ratio: float
    zero_start: bool = False

    @property
    def peak_step(self) -> int:
        return int(np.argmax(np.abs(self.trajectory).sum(axis=1)))


def simulate(model: DesyncModel, x0, T: int, norm="ell1") -> Simulation:
    """Run ``x_i <- (A x)_i`` with ``i = i(n)`` for ``T`` steps.

    The peak ratio is ``max_n ||x(n)|| / ||x(0)||``; it is 1 for a zero start,
    which is flagged.
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    norm = check_norm(norm)
    A = model.A
    N = model.N
    x = check_vector(x0, N, "x0").copy()
    idx = model.schedule.take(T, N)
    traj = np.empty((T + 1, N))
    traj[0] = x
    for n, i in enumerate(idx):
        x[i] = A[i] @ x
        traj[n + 1] = x
    n0 = vector_norm(traj[0], norm)
    if n0 == 0.0:
        return Simulation(traj, idx, 1.0, True)
    peak = max(vector_norm(v, norm) for v in traj) / n0
    return Simulation(traj, idx, peak)
