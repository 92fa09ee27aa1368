"""Small dense linear programming by the two-phase simplex method.

The solver is deterministic: Dantzig pricing is used until a run of degenerate
pivots is seen, after which Bland's smallest-index rule takes over until the
objective moves again.  Cycling can only happen inside a degenerate run, so
this rules it out.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

FEAS_TOL = 1e-9
_PIVOT_TOL = 1e-11
_DEGENERATE_STREAK = 25


@dataclass(frozen=True)
class LPProblem:
    """``min c.x`` (or max) s.t. ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= lower``.

    ``lower=None`` means every variable is nonnegative; individual entries may
    be ``-inf`` for free variables.
    """

    c: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    lower: Optional[np.ndarray] = None
    maximize: bool = False


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    optimum: float
    x: Optional[np.ndarray]
    iterations: int = 0


def _as_block(A, b, n, name):
    if A is None:
        if b is not None and np.size(b):
            raise ValueError(f"{name}: right-hand side given without a matrix")
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if A.shape[1] != n:
        raise ValueError(f"{name} has {A.shape[1]} columns, expected {n}")
    if b.shape != (A.shape[0],):
        raise ValueError(f"{name} right-hand side has shape {b.shape}, expected ({A.shape[0]},)")
    return A, b


class _Tableau:
    def __init__(self, T, basis):
        self.T = T
        self.basis = basis
        self.iterations = 0
        self.bland = False
        self._streak = 0

    def pivot(self, r, e):
        T = self.T
        T[r] /= T[r, e]
        col = T[:, e].copy()
        col[r] = 0.0
        rows = np.flatnonzero(col)
        T[rows] -= col[rows, None] * T[r]
        T[:, e] = 0.0
        T[r, e] = 1.0
        self.basis[r] = e
        self.iterations += 1

    def run(self, allowed, max_iter, floor=None):
        """Iterate until optimal or unbounded over the ``allowed`` columns.

        ``floor`` is a known lower bound on the objective (0 in phase 1);
        reaching it ends the run early.
        """
        T = self.T
        m = T.shape[0] - 1
        while self.iterations < max_iter:
            if floor is not None and -T[-1, -1] <= floor:
                return "optimal"
            red = T[-1, :-1]
            cand = np.flatnonzero((red < -FEAS_TOL) & allowed)
            if cand.size == 0:
                return "optimal"
            if self.bland:
                e = int(cand[0])
            else:
                e = int(cand[np.argmin(red[cand])])
            colv = T[:m, e]
            rows = np.flatnonzero(colv > _PIVOT_TOL)
            if rows.size == 0:
                return "unbounded"
            ratios = T[rows, -1] / colv[rows]
            best = ratios.min()
            ties = rows[ratios <= best + FEAS_TOL * max(1.0, abs(best))]
            if ties.size > 1:
                basic = np.array([self.basis[i] for i in ties])
                r = int(ties[np.argmin(basic)])
            else:
                r = int(ties[0])
            if best <= FEAS_TOL:
                self._streak += 1
                if self._streak >= _DEGENERATE_STREAK:
                    self.bland = True
            else:
                self._streak = 0
                self.bland = False
            self.pivot(r, e)
        raise RuntimeError("simplex iteration limit reached")


def lp_solve(problem: LPProblem, max_iter: Optional[int] = None) -> LPResult:
    c = np.atleast_1d(np.asarray(problem.c, dtype=float))
    n = c.size
    A_eq, b_eq = _as_block(problem.A_eq, problem.b_eq, n, "A_eq")
    A_ub, b_ub = _as_block(problem.A_ub, problem.b_ub, n, "A_ub")
    lower = np.zeros(n) if problem.lower is None else np.asarray(problem.lower, dtype=float)
    if lower.shape != (n,):
        raise ValueError(f"lower has shape {lower.shape}, expected ({n},)")
    if np.any(np.isposinf(lower)) or np.any(np.isnan(lower)):
        raise ValueError("lower bounds must be finite or -inf")

    # x = shift + C y with y >= 0; free variables are split in two columns
    free = np.isneginf(lower)
    shift = np.where(free, 0.0, lower)
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        cols.append(e)
        if free[j]:
            cols.append(-e)
    C = np.column_stack(cols) if cols else np.zeros((n, 0))
    ny = C.shape[1]

    sign = -1.0 if problem.maximize else 1.0
    cost = sign * (c @ C)
    Ae = A_eq @ C
    be = b_eq - A_eq @ shift
    Au = A_ub @ C
    bu = b_ub - A_ub @ shift
    me, mu = Ae.shape[0], Au.shape[0]
    m = me + mu

    # columns: y | slacks | artificials
    A = np.zeros((m, ny + mu))
    A[:me, :ny] = Ae
    A[me:, :ny] = Au
    A[me:, ny:] = np.eye(mu)
    b = np.concatenate([be, bu])
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    basis = [-1] * m
    art_rows = []
    for i in range(m):
        if i >= me and not flip[i]:
            basis[i] = ny + (i - me)
        else:
            art_rows.append(i)
    na = len(art_rows)
    ncol = ny + mu + na
    T = np.zeros((m + 1, ncol + 1))
    T[:m, :ny + mu] = A
    T[:m, -1] = b
    for k, i in enumerate(art_rows):
        T[i, ny + mu + k] = 1.0
        basis[i] = ny + mu + k
        T[-1] -= T[i]
    T[-1, ny + mu:ny + mu + na] = 0.0

    if max_iter is None:
        max_iter = 50 * (m + ncol) + 100
    tab = _Tableau(T, basis)
    allowed = np.ones(ncol, dtype=bool)
    if na:
        tab.run(allowed, max_iter, floor=FEAS_TOL * 1e-3)
        scale = 1.0 + float(np.max(np.abs(b))) if m else 1.0
        if -tab.T[-1, -1] > FEAS_TOL * scale:
            return LPResult("infeasible", float("nan"), None, tab.iterations)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for i in range(m):
            if tab.basis[i] >= ny + mu:
                row = tab.T[i, :ny + mu]
                j = int(np.argmax(np.abs(row))) if row.size else 0
                if row.size and abs(row[j]) > 1e-9:
                    tab.pivot(i, j)
                    keep.append(i)
            else:
                keep.append(i)
        T = tab.T[keep + [m]][:, list(range(ny + mu)) + [ncol]]
        tab = _Tableau(T, [tab.basis[i] for i in keep])
        tab.iterations = 0
        m = len(keep)
        A = A[keep]
        b = b[keep]
        ncol = ny + mu

    full_cost = np.concatenate([cost, np.zeros(mu)])
    tab.T[-1, :] = 0.0
    tab.T[-1, :ncol] = full_cost
    for i, j in enumerate(tab.basis):
        tab.T[-1] -= full_cost[j] * tab.T[i]
    status = tab.run(np.ones(ncol, dtype=bool), max_iter)
    if status == "unbounded":
        return LPResult("unbounded", sign * -np.inf, None, tab.iterations)

    y_full = np.zeros(ncol)
    B = A[:, tab.basis]
    try:
        y_full[tab.basis] = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        y_full[tab.basis] = tab.T[:m, -1]
    if np.any(y_full < -FEAS_TOL):
        y_full[tab.basis] = tab.T[:m, -1]
    y_full = np.maximum(y_full, 0.0)
    x = shift + C @ y_full[:ny]
    return LPResult("optimal", float(c @ x), x, tab.iterations)


def check_feasible(problem: LPProblem, x, tol: float = 1e-7) -> bool:
    """True when ``x`` satisfies every constraint of ``problem`` within ``tol``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    A_eq, b_eq = _as_block(problem.A_eq, problem.b_eq, n, "A_eq")
    A_ub, b_ub = _as_block(problem.A_ub, problem.b_ub, n, "A_ub")
    lower = np.zeros(n) if problem.lower is None else np.asarray(problem.lower, dtype=float)
    ok = np.all(x >= lower - tol)
    if A_eq.shape[0]:
        ok &= np.all(np.abs(A_eq @ x - b_eq) <= tol * (1 + np.abs(b_eq)))
    if A_ub.shape[0]:
        ok &= np.all(A_ub @ x <= b_ub + tol * (1 + np.abs(b_ub)))
    return bool(ok)
