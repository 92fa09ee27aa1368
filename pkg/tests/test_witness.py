import numpy as np
import pytest

from peakbound import (CertificateViolation, QCParams, build_witness, enumerate_products,
                       expansion_step, find_expanding_seed, robustness_scan, sigma_estimate,
                       stability_certificate)
from peakbound.witness import replay, verify_witness

R90 = np.array([[0.0, -1.0], [1.0, 0.0]])
SHEAR = np.array([[1.0, 1.0], [0.0, 1.0]])


def _growth_ok(F, w, order):
    """Replay with plain numpy: ||x(n)|| >= kappa lam^n ||x(0)|| for every n."""
    x = np.asarray(w.x0, float)
    n0 = np.linalg.norm(x, order)
    for n in range(len(w.schedule) + 1):
        if n:
            x = F[w.schedule[n - 1]] @ x
        if np.linalg.norm(x, order) < w.kappa * w.lam ** n * n0 * (1 - 1e-12):
            return False
    return True


def test_scaled_rotation():
    F = [2.0 * R90]
    w = build_witness(F, None, [1.0, 0.0], 200, QCParams(norm="ell2")).witness
    assert w.lam == pytest.approx(2.0, abs=1e-12)
    assert w.kappa == pytest.approx(1.0, abs=1e-12)
    assert w.schedule == [0] * 200
    assert _growth_ok(F, w, 2)


def test_shear_with_rotation():
    F = [SHEAR, R90]
    w = build_witness(F, None, [0.2, 1.0], 150).witness
    assert w is not None and w.lam > 1.0
    assert _growth_ok(F, w, 1)
    assert verify_witness(F, w)
    # checkpoints are never more than one block apart
    gaps = np.diff([0] + w.checkpoints)
    assert gaps.max() <= w.block_bound == len(w.seed.word) + 1


def test_contraction_has_no_witness():
    out = build_witness([0.5 * np.eye(2)], None, [1.0, 0.0], 50)
    assert out.witness is None and "quasi-controllable" in out.diagnostic


def test_no_expanding_seed():
    # quasi-controllable but strongly contracting
    out = build_witness([0.1 * R90], None, [1.0, 0.0], 50, depth=3)
    assert out.witness is None and "no expanding product" in out.diagnostic


def test_tampered_witness_fails_verification():
    F = [2.0 * R90]
    w = build_witness(F, None, [1.0, 0.0], 20, QCParams(norm="ell2")).witness
    w.lam = 2.5
    assert not verify_witness(F, w)


def test_replay():
    traj = replay([SHEAR, R90], [0, 1], [1.0, 1.0])
    assert traj.tolist() == [[1.0, 1.0], [2.0, 1.0], [-1.0, 2.0]]


def test_expansion_step_detects_bad_sigma():
    F = [SHEAR, R90]
    Fp = enumerate_products(F, 1)
    with pytest.raises(CertificateViolation):
        expansion_step(Fp, np.eye(2), [1.0, 0.0], mu=100.0)


def test_seed_search():
    rep = sigma_estimate([SHEAR, R90])
    seed = find_expanding_seed([SHEAR, R90], 1, rep.sigma_lower, 6)
    assert seed is not None and seed.mu > 1.0
    with pytest.raises(ValueError):
        find_expanding_seed([SHEAR, R90], 1, 0.0, 6)


def test_witness_excludes_stability_certificate():
    for F in ([2.0 * R90], [SHEAR, R90]):
        assert build_witness(F, None, [1.0, 0.5], 60).witness is not None
        for kmax in (1, 4, 8):
            assert stability_certificate(F, kmax) is None


def test_robustness_scan():
    rows = robustness_scan(lambda t: [SHEAR, R90 * (1 - t)], [0.0, 0.1], horizon=60)
    assert [r.witness_found for r in rows] == [True, True]
    assert all(r.lam > 1 for r in rows)


def test_limit_family_bounds_approximants():
    # stable approximants of a quasi-controllable limit: peaks stay below 1/sigma
    from peakbound import chi_lower
    limit = [0.5 * R90, np.array([[0.3, 0.2], [0.0, 0.4]])]
    sigma = sigma_estimate(limit).sigma_lower
    peaks = []
    for m in (2, 4, 8, 16):
        F = [A * (1 - 1 / m ** 2) for A in limit]
        peaks.append(chi_lower(F, 10)[0])
    assert max(peaks) <= 1 / sigma + 1e-6
