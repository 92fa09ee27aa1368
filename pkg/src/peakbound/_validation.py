"""Input validation helpers shared by the functional API and the estimators."""
import numpy as np

NORMS = ("ell1", "ell2", "ellinf")
_ALIASES = {
    "ell1": "ell1", "l1": "ell1", "1": "ell1",
    "ell2": "ell2", "l2": "ell2", "2": "ell2",
    "ellinf": "ellinf", "linf": "ellinf", "inf": "ellinf",
}


def check_norm(norm):
    """Return the canonical norm tag for ``norm`` (accepts ``l1``/``linf`` aliases)."""
    key = str(norm).lower()
    if key not in _ALIASES:
        raise ValueError(f"unknown norm {norm!r}; expected one of {NORMS}")
    return _ALIASES[key]


def check_matrix(M, name="matrix"):
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def check_square(M, name="matrix"):
    A = check_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def check_vector(x, dim=None, name="vector", nonzero=False):
    v = np.array(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    if dim is not None and v.size != dim:
        raise ValueError(f"{name} has dimension {v.size}, expected {dim}")
    if nonzero and not np.any(v):
        raise ValueError(f"{name} must be nonzero")
    return v
