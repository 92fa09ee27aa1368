import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from peakbound import (MatrixFamily, ProductCapError, enumerate_products, minimal_length, orbit,
                       rank)

R90 = np.array([[0.0, -1.0], [1.0, 0.0]])
SHEAR = np.array([[1.0, 1.0], [0.0, 1.0]])


def test_examples():
    P = enumerate_products([2 * np.eye(2)], 1)
    assert P.words == ((), (0,))
    assert len(enumerate_products([SHEAR, R90], 2)) == 7
    assert enumerate_products([SHEAR], 0).words == ((),)


def test_rotation_orbit_and_lengths():
    P = enumerate_products([R90], 1)
    assert orbit(P, [1.0, 0.0]).tolist() == [[1.0, 0.0], [0.0, 1.0]]
    P4 = enumerate_products([R90], 4)
    assert len(P4) == 4                      # R90^4 = I is a duplicate
    assert minimal_length(P4, np.eye(2)) == 0
    assert minimal_length(P4, R90) == 1
    assert minimal_length(P4, 2 * np.eye(2)) is None


def test_words_multiply_to_matrices():
    F = MatrixFamily([SHEAR, R90])
    P = enumerate_products(F, 3)
    for w, M in P.items():
        assert np.allclose(F.word_matrix(w), M)


def test_cap(monkeypatch):
    with pytest.raises(ProductCapError):
        enumerate_products([SHEAR, R90, 2 * SHEAR], 6, cap=50)
    monkeypatch.setenv("PEAKBOUND_CAP", "10")
    with pytest.raises(ProductCapError):
        enumerate_products([SHEAR, R90], 4)


def test_family_validation():
    with pytest.raises(ValueError):
        MatrixFamily([])
    with pytest.raises(ValueError):
        MatrixFamily([np.eye(2), np.eye(3)])
    with pytest.raises(ValueError):
        MatrixFamily([np.array([[np.nan, 0.0], [0.0, 1.0]])])
    F = MatrixFamily([SHEAR])
    with pytest.raises(ValueError):
        F.members[0][0, 0] = 5.0


def test_negative_depth():
    with pytest.raises(ValueError):
        enumerate_products([SHEAR], -1)


mats = arrays(float, (2, 2, 2), elements=st.integers(-2, 2).map(float))


@settings(max_examples=40, deadline=None)
@given(mats, st.integers(0, 3))
def test_growth_and_closure(stack, k):
    F = list(stack)
    Pk = enumerate_products(F, k)
    Pk1 = enumerate_products(F, k + 1)
    assert len(Pk1) >= len(Pk)
    for M in Pk.matrices:
        for A in F:
            assert minimal_length(Pk1, A @ M) is not None


@settings(max_examples=40, deadline=None)
@given(arrays(float, (2, 3, 3), elements=st.floats(-2, 2)), arrays(float, 3, elements=st.floats(-2, 2)),
       st.floats(-3, 3))
def test_orbit_is_linear(stack, x, a):
    P = enumerate_products(list(stack), 2)
    assert np.allclose(orbit(P, a * x), a * orbit(P, x))


def _all_words(F, k):
    out = [np.eye(F[0].shape[0])]
    level = [out[0]]
    for _ in range(k):
        level = [A @ M for M in level for A in F]
        out += level
    return out


def test_deduplication_keeps_span():
    rng = np.random.default_rng(5)
    for _ in range(20):
        F = [rng.integers(-1, 2, size=(3, 3)).astype(float) for _ in range(2)]
        x = rng.normal(size=3)
        P = enumerate_products(F, 3)
        full = np.array([M @ x for M in _all_words(F, 3)])
        assert rank(list(orbit(P, x))) == rank(list(full))
