"""scikit-learn style wrappers around the functional API.

``fit`` takes a matrix family (a sequence of square matrices or a
``MatrixFamily``; a single base matrix for ``DesyncSystem``) and stores the
results in trailing-underscore attributes.  Hyperparameters are plain
constructor arguments, so ``get_params``/``set_params``/``clone`` work.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .desync import DesyncModel, MixtureFamily, RandomSchedule, desync_peak_bound, simulate
from .qc import QCParams, radius_at, sigma_estimate
from .semigroup import MatrixFamily, as_family, enumerate_products
from .stability import chi_lower, chi_upper, stability_certificate
from .witness import build_witness


class _QCMixin:
    def _qc_params(self) -> QCParams:
        return QCParams(p=self.p, norm=self.norm, n_starts=self.n_starts,
                        grid_resolution=self.grid_resolution, rank_tol=self.rank_tol,
                        seed=self.seed, threshold=self.threshold, max_cells=self.max_cells,
                        rel_gap=self.rel_gap, exploratory=self.exploratory)


class QuasiControllability(_QCMixin, TransformerMixin, BaseEstimator):
    """Estimate sigma_p of a family; ``transform`` maps vectors to hull radii.

    Attributes after ``fit``: ``report_``, ``verdict_``, ``sigma_upper_``,
    ``sigma_lower_``, ``family_``, ``p_``.
    """

    def __init__(self, p: Optional[int] = None, norm: str = "ell1", n_starts: int = 4,
                 grid_resolution: Optional[int] = None, rank_tol: float = 1e-9, seed: int = 0,
                 threshold: float = 1e-7, max_cells: Optional[int] = None, rel_gap: float = 0.1,
                 exploratory: bool = False):
        self.p = p
        self.norm = norm
        self.n_starts = n_starts
        self.grid_resolution = grid_resolution
        self.rank_tol = rank_tol
        self.seed = seed
        self.threshold = threshold
        self.max_cells = max_cells
        self.rel_gap = rel_gap
        self.exploratory = exploratory

    def fit(self, F, y=None):
        F = as_family(F)
        params = self._qc_params()
        self.report_ = sigma_estimate(F, params)
        self.family_ = F
        self.p_ = self.report_.p
        self.verdict_ = self.report_.verdict
        self.sigma_upper_ = self.report_.sigma_upper
        self.sigma_lower_ = self.report_.sigma_lower
        self._products = enumerate_products(F, self.p_)
        return self

    def transform(self, X):
        """Inscribed-ball radius of ``absco(F_p(x/||x||))`` for each row ``x``."""
        check_is_fitted(self, "report_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.family_.N:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.family_.N}")
        r = [radius_at(self.family_, self.p_, x, self.norm, self.rank_tol, self._products)
             for x in X]
        return np.asarray(r)[:, None]

    def predict(self, X=None):
        """The verdict, repeated per row of ``X`` when given."""
        check_is_fitted(self, "report_")
        if X is None:
            return self.verdict_
        return np.array([self.verdict_] * len(check_array(X, dtype=float)))


class PeakAnalyzer(_QCMixin, BaseEstimator):
    """Bounds on the overshooting measure of a family.

    Attributes after ``fit``: ``chi_lower_``, ``word_``, ``chi_upper_``,
    ``upper_reason_``, ``certificate_``, ``qc_``.
    """

    def __init__(self, depth: int = 12, kmax: int = 8, p: Optional[int] = None,
                 norm: str = "ell1", n_starts: int = 4, grid_resolution: Optional[int] = None,
                 rank_tol: float = 1e-9, seed: int = 0, threshold: float = 1e-7,
                 max_cells: Optional[int] = None, rel_gap: float = 0.1, exploratory: bool = False):
        self.depth = depth
        self.kmax = kmax
        self.p = p
        self.norm = norm
        self.n_starts = n_starts
        self.grid_resolution = grid_resolution
        self.rank_tol = rank_tol
        self.seed = seed
        self.threshold = threshold
        self.max_cells = max_cells
        self.rel_gap = rel_gap
        self.exploratory = exploratory

    def fit(self, F, y=None):
        F = as_family(F)
        params = self._qc_params()
        self.certificate_ = stability_certificate(F, self.kmax, self.norm)
        self.chi_lower_, self.word_ = chi_lower(F, self.depth, self.norm,
                                                certificate=self.certificate_)
        self.qc_ = sigma_estimate(F, params)
        self.chi_upper_, self.upper_reason_ = chi_upper(F, params, self.kmax, self.qc_,
                                                        self.certificate_)
        return self

    def predict(self, X=None):
        """``(chi_lower, chi_upper)``."""
        check_is_fitted(self, "chi_lower_")
        return self.chi_lower_, self.chi_upper_


class DesyncSystem(BaseEstimator):
    """Mixture family of a base matrix and simulated desynchronized runs.

    ``fit(A)`` sets ``family_``, ``alpha_``, ``beta_``, ``sigma_bound_``,
    ``peak_bound_``.  ``predict(X0)`` returns the peak ratio of one run per
    row, using random schedules seeded ``seed, seed+1, ...``.
    """

    def __init__(self, T: int = 200, kmax: int = 8, norm: str = "ell1", seed: int = 0):
        self.T = T
        self.kmax = kmax
        self.norm = norm
        self.seed = seed

    def fit(self, A, y=None):
        A = check_array(A, dtype=float)
        self.family_ = MixtureFamily(A, self.norm)
        self.alpha_ = self.family_.alpha
        self.beta_ = self.family_.beta
        self.sigma_bound_ = self.family_.bound
        pb = desync_peak_bound(A, self.kmax, self.norm)
        self.peak_bound_ = pb.value
        self.peak_bound_reason_ = pb.reason
        return self

    def predict(self, X0):
        check_is_fitted(self, "family_")
        X0 = check_array(X0, dtype=float)
        out = []
        for k, x in enumerate(X0):
            model = DesyncModel(self.family_.base, RandomSchedule(self.seed + k))
            out.append(simulate(model, x, self.T, self.norm).peak_ratio)
        return np.asarray(out)


class WitnessBuilder(_QCMixin, BaseEstimator):
    """Exponential-instability witnesses for a fixed family.

    ``fit`` certifies sigma once; ``transform(X0)`` returns ``(lambda, kappa)``
    per start vector (NaN when no verified witness exists) and keeps the
    witnesses in ``witnesses_``.
    """

    def __init__(self, horizon: int = 200, depth: int = 8, p: Optional[int] = None,
                 norm: str = "ell1", n_starts: int = 4, grid_resolution: Optional[int] = None,
                 rank_tol: float = 1e-9, seed: int = 0, threshold: float = 1e-7,
                 max_cells: Optional[int] = None, rel_gap: float = 0.1, exploratory: bool = False):
        self.horizon = horizon
        self.depth = depth
        self.p = p
        self.norm = norm
        self.n_starts = n_starts
        self.grid_resolution = grid_resolution
        self.rank_tol = rank_tol
        self.seed = seed
        self.threshold = threshold
        self.max_cells = max_cells
        self.rel_gap = rel_gap
        self.exploratory = exploratory

    def fit(self, F, y=None):
        self.family_: MatrixFamily = as_family(F)
        self.qc_ = sigma_estimate(self.family_, self._qc_params())
        return self

    def transform(self, X0):
        check_is_fitted(self, "qc_")
        X0 = check_array(X0, dtype=float)
        self.witnesses_ = []
        out = np.full((len(X0), 2), np.nan)
        if self.qc_.verdict != "yes":
            self.witnesses_ = [None] * len(X0)
            return out
        for k, x in enumerate(X0):
            res = build_witness(self.family_, self.p, x, self.horizon, self._qc_params(),
                                self.depth, self.qc_.sigma_lower)
            self.witnesses_.append(res.witness)
            if res.witness is not None:
                out[k] = res.witness.lam, res.witness.kappa
        return out
