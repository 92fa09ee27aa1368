import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from peakbound import (DesyncModel, ExplicitSchedule, MixtureFamily, RandomSchedule, RoundRobin,
                       ScheduleExhausted, alpha, beta, chi_lower, desync_peak_bound, is_irreducible,
                       mixture_sigma_bound, mixtures, sigma_estimate, simulate)

import oracles

A_HALF = np.array([[0.0, 0.5], [0.5, 0.0]])


def test_constants_for_symmetric_example():
    # frozen: alpha from a grid minimization of ||(A - I) x||_1, beta by hand
    assert alpha(A_HALF) == pytest.approx(oracles.min_gain_grid(A_HALF - np.eye(2)) / 4, abs=1e-12)
    assert alpha(A_HALF) == pytest.approx(0.125, abs=1e-12)
    assert beta(A_HALF) == 0.25
    assert mixture_sigma_bound(A_HALF).value == pytest.approx(1 / 32, abs=1e-12)


def test_mixtures_shape():
    F = mixtures(A_HALF)
    assert np.array_equal(F[0], [[0.0, 0.5], [0.0, 1.0]])
    assert np.array_equal(F[1], [[1.0, 0.0], [0.5, 0.0]])


@settings(max_examples=50, deadline=None)
@given(arrays(float, st.integers(1, 4).map(lambda n: (n, n)), elements=st.floats(-5, 5)))
def test_mixture_identity(A):
    N = A.shape[0]
    F = MixtureFamily(A)
    assert np.array_equal(sum(M - np.eye(N) for M in F), A - np.eye(N))


def test_irreducibility():
    assert is_irreducible(A_HALF)
    assert not is_irreducible(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert is_irreducible(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]))


def test_bound_preconditions():
    b = mixture_sigma_bound(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert b.value is None and "reducible" in b.reason and "eigenvalue" in b.reason
    b = mixture_sigma_bound(np.full((2, 2), 0.5))
    assert b.value is None and "eigenvalue" in b.reason


def test_mixture_sigma_bound_holds():
    rng = np.random.default_rng(51)
    for N in (2, 3):
        A = oracles.random_irreducible(rng, N)
        F = MixtureFamily(A)
        rep = sigma_estimate(F, p=N)
        assert rep.verdict == "yes"
        assert rep.sigma_upper >= F.bound - 1e-9


def test_converse_direction():
    for A in (np.array([[0.5, 0.3], [0.0, 0.2]]),          # reducible
              np.array([[0.5, 0.5], [0.5, 0.5]])):          # 1 is an eigenvalue
        assert sigma_estimate(MixtureFamily(A), p=2).verdict == "no"


def test_schedules():
    assert RoundRobin(1).take(5, 3).tolist() == [1, 2, 0, 1, 2]
    assert np.array_equal(RandomSchedule(4).take(10, 3), RandomSchedule(4).take(10, 3))
    with pytest.raises(ScheduleExhausted):
        ExplicitSchedule([0, 1]).take(3, 2)
    with pytest.raises(ValueError):
        ExplicitSchedule([0, 5]).take(2, 2)


def test_simulation_matches_products():
    F = MixtureFamily(A_HALF)
    sim = simulate(DesyncModel(A_HALF, ExplicitSchedule([0, 1, 1, 0])), [1.0, -2.0], 4)
    x = np.array([1.0, -2.0])
    for i in [0, 1, 1, 0]:
        x = F[i] @ x
    assert np.allclose(sim.trajectory[-1], x)


def test_zero_start_flagged():
    sim = simulate(DesyncModel(A_HALF, RoundRobin()), [0.0, 0.0], 5)
    assert sim.zero_start and sim.peak_ratio == 1.0


def test_peak_bound_and_simulations():
    pb = desync_peak_bound(A_HALF)
    assert pb.value == pytest.approx(32.0) and pb.certificate is not None
    F = MixtureFamily(A_HALF)
    chi, _ = chi_lower(F, 8)
    rng = np.random.default_rng(52)
    for k in range(20):
        T = 8
        sim = simulate(DesyncModel(A_HALF, RandomSchedule(k)), rng.normal(size=2), T)
        # a run is one product of at most T mixtures
        assert sim.peak_ratio <= chi + 1e-12
        assert sim.peak_ratio <= pb.value


def test_peak_bound_needs_stability():
    pb = desync_peak_bound(np.array([[0.0, 3.0], [3.0, 0.0]]))
    assert pb.value is None and "certificate" in pb.reason
