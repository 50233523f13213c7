import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crstates.state import (
    DEFAULT_TOL,
    BipartiteState,
    DimensionError,
    DomainError,
    ParameterError,
    ToleranceConfig,
    is_hermitian,
    is_projection,
    is_psd,
    numerical_rank,
    random_state,
    random_unitary,
    support_basis,
    support_projection,
)


@pytest.mark.parametrize(
    "kwargs",
    [{"tol_psd": 0.0}, {"tol_zero": -1e-9}, {"tol_gap": float("nan")}, {"tol_zero": 1e-6, "tol_gap": 1e-7}],
)
def test_tolerance_config_rejects_bad_values(kwargs):
    with pytest.raises(ParameterError):
        ToleranceConfig(**kwargs)


def test_tolerance_defaults():
    assert DEFAULT_TOL.to_dict() == {"tol_psd": 1e-9, "tol_zero": 1e-9, "tol_gap": 1e-7}


def test_state_validation():
    with pytest.raises(DimensionError):
        BipartiteState(2, 2, np.eye(3))
    with pytest.raises(DimensionError):
        BipartiteState(0, 2, np.eye(0))
    with pytest.raises(DomainError):
        BipartiteState(2, 2, -np.eye(4))
    bad = np.eye(4)
    bad[0, 0] = np.nan
    with pytest.raises(DomainError):
        BipartiteState(2, 2, bad)


def test_state_is_frozen_copy():
    src = np.eye(4, dtype=complex)
    g = BipartiteState(2, 2, src)
    src[0, 0] = 5
    assert g.matrix[0, 0] == 1
    with pytest.raises(ValueError):
        g.matrix[0, 0] = 2
    assert g.tensor().shape == (2, 2, 2, 2)
    assert "k=2" in repr(g)


def test_psd_scale_is_relative():
    mat = np.diag([1e6, -1e-5])
    assert is_psd(mat)
    assert not is_psd(np.diag([1.0, -1e-6]))
    assert not is_psd(np.array([[1, 1], [0, 1]]))


def test_support_of_non_psd_raises():
    with pytest.raises(DomainError):
        support_basis(np.diag([1.0, -1.0]))


def test_support_of_zero_is_empty():
    assert support_basis(np.zeros((3, 3))).shape == (3, 0)
    assert numerical_rank(np.zeros((3, 3))) == 0


@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_random_state_properties(k, m, data):
    rank = data.draw(st.integers(1, k * m))
    seed = data.draw(st.integers(0, 2**32 - 1))
    g = random_state(k, m, rank, seed)
    assert abs(g.trace - 1) < 1e-12
    assert is_psd(g.matrix)
    assert g.rank() == rank
    p = support_projection(g.matrix)
    assert is_projection(p)
    assert np.linalg.norm(p @ g.matrix - g.matrix) < 1e-10


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_random_unitary_is_unitary(n, seed):
    u = random_unitary(n, seed)
    assert np.allclose(u.conj().T @ u, np.eye(n), atol=1e-12)


def test_hermitian_check():
    assert is_hermitian(np.array([[1, 1j], [-1j, 2]]))
    assert not is_hermitian(np.array([[1, 1j], [1j, 2]]))


def test_random_state_rank_bounds():
    with pytest.raises(ParameterError):
        random_state(2, 2, 5, 0)
