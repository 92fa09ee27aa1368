"""The reference computations are checked against closed forms before use."""
import numpy as np
import pytest

import oracles


def test_lp_oracle():
    # max x + y on the unit box with x + 2y <= 2
    v = oracles.lp_by_vertices([1.0, 1.0], A_ub=[[1.0, 2.0], [1.0, 0.0], [0.0, 1.0]],
                               b_ub=[2.0, 1.0, 1.0], maximize=True)
    assert v == pytest.approx(1.5)
    assert oracles.lp_by_vertices([1.0], A_eq=[[1.0]], b_eq=[-1.0]) is None


def test_hull_oracle():
    assert oracles.hull_radius_2d(np.eye(2), [1.0, 1.0]) == pytest.approx(0.5)
    assert oracles.ell1_ball_radius_2d(np.eye(2)) == pytest.approx(1.0)


def test_grid_min_gain():
    assert oracles.min_gain_grid(np.array([[-1.0, 0.5], [0.5, -1.0]])) == pytest.approx(0.5)
    # cross-check with 1 / ||M^-1||_1
    M = np.array([[-1.0, 0.5], [0.5, -1.0]])
    assert 1 / oracles.induced(np.linalg.inv(M), "ell1") == pytest.approx(0.5)


def test_powers():
    r = 0.5
    E = np.array([[r, 1.0], [0.0, r]])
    # ||E^n||_1 = r^n + n r^(n-1): 1.5, 1.25, 0.875, ...
    assert oracles.power_sup(E, 50) == pytest.approx(1.5)


def test_exhaustive_chi():
    v, w = oracles.exhaustive_chi([np.array([[0.0, 2.0], [0.0, 0.0]])], 3)
    assert v == 2.0 and w == (0,)


def test_kalman():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert oracles.kalman_pair(A, np.array([0.0, 1.0]), np.array([1.0, 0.0]))
    assert not oracles.kalman_pair(A, np.array([1.0, 0.0]), np.array([1.0, 0.0]))


def test_random_triple_kinds():
    rng = np.random.default_rng(0)
    for kind, want in ((1, False), (2, False)):
        for _ in range(5):
            assert oracles.kalman_pair(*oracles.random_triple(rng, 3, kind)) is want


def test_block_family_is_invariant():
    members, basis = oracles.block_upper_family(np.random.default_rng(1), 3, 2, 1)
    assert oracles.common_invariant(members, basis.T)
