"""Quasi-controllability measures, peak-effect bounds and instability witnesses
for finite families of matrices."""

__version__ = "0.1.0"

from .exceptions import (CertificateViolation, ModelFileError, PeakboundError,
                         ProductCapError, ScheduleExhausted)
from .linalg import induced_norm, min_gain, rank, vector_norm
from .lp import LPProblem, LPResult, lp_solve
from .semigroup import MatrixFamily, ProductSet, enumerate_products, minimal_length, orbit
from .geometry import BallContainment, SymmetricPolytope, directional_radius, inscribed_radius
from .qc import (QCParams, QCReport, continuity_scan, invariant_subspace_certificate,
                 radius_at, sigma_estimate, span_test)
from .stability import (PeakReport, StabilityCertificate, chi_lower, chi_upper,
                        circle_feedback_family, peak_report, stability_certificate)
from .desync import (DesyncModel, ExplicitSchedule, MixtureFamily, RandomSchedule, RoundRobin,
                     alpha, beta, desync_peak_bound, is_irreducible, mixture_sigma_bound,
                     mixtures, simulate)
from .witness import (ExpansionStep, InstabilityWitness, build_witness, expansion_step,
                      find_expanding_seed, robustness_scan)

__all__ = [
    "CertificateViolation", "ModelFileError", "PeakboundError", "ProductCapError",
    "ScheduleExhausted", "induced_norm", "min_gain", "rank", "vector_norm", "LPProblem",
    "LPResult", "lp_solve", "MatrixFamily", "ProductSet", "enumerate_products",
    "minimal_length", "orbit", "BallContainment", "SymmetricPolytope", "directional_radius",
    "inscribed_radius", "QCParams", "QCReport", "continuity_scan",
    "invariant_subspace_certificate", "radius_at", "sigma_estimate", "span_test",
    "PeakReport", "StabilityCertificate", "chi_lower", "chi_upper",
    "circle_feedback_family", "peak_report", "stability_certificate", "DesyncModel",
    "ExplicitSchedule", "MixtureFamily", "RandomSchedule", "RoundRobin", "alpha", "beta",
    "desync_peak_bound", "is_irreducible", "mixture_sigma_bound", "mixtures", "simulate",
    "ExpansionStep", "InstabilityWitness", "build_witness", "expansion_step",
    "find_expanding_seed", "robustness_scan",
]
