import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermitian_btp import catalog
from hermitian_btp.engine import geometry
from hermitian_btp.errors import DimensionMismatch, NotNormal
from hermitian_btp.forms import transform_structure
from hermitian_btp.tensor_core import (
    BARRED,
    DIRECTION,
    LOWER,
    UPPER,
    DenseTensor,
    UnitaryMatrix,
    change_frame,
    unitary_diagonalize_normal,
)


def _rand(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_identity_diagonalizes_to_itself():
    U, d = unitary_diagonalize_normal(np.eye(3))
    np.testing.assert_allclose(U.matrix, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(d, np.ones(3), atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_scrambled_diagonal_is_recovered_in_sort_order(seed):
    V = UnitaryMatrix.random(3, np.random.default_rng(seed)).matrix
    M = V @ np.diag([2j, -1j, 0]) @ V.conj().T
    U, d = unitary_diagonalize_normal(M)
    # sorted by real part then imaginary part, both descending
    np.testing.assert_allclose(d, [2j, 0, -1j], atol=1e-10)
    np.testing.assert_allclose(U.matrix.conj().T @ M @ U.matrix, np.diag(d), atol=1e-9)


def test_zero_matrix():
    U, d = unitary_diagonalize_normal(np.zeros((2, 2)))
    np.testing.assert_allclose(d, 0, atol=1e-15)
    assert np.abs(U.matrix.conj().T @ np.zeros((2, 2)) @ U.matrix).max() == 0


def test_non_normal_rejected():
    with pytest.raises(NotNormal):
        unitary_diagonalize_normal(np.array([[0, 1], [0, 0]]))


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        unitary_diagonalize_normal(np.zeros((2, 3)))


def test_degenerate_cluster_is_deterministic():
    rng = np.random.default_rng(3)
    V = UnitaryMatrix.random(4, rng).matrix
    M = V @ np.diag([1, 1, 1j, -2]) @ V.conj().T
    U1, _ = unitary_diagonalize_normal(M)
    U2, _ = unitary_diagonalize_normal(M.copy())
    np.testing.assert_array_equal(U1.matrix, U2.matrix)


@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_normal_matrices_reassemble(n, seed):
    rng = np.random.default_rng(seed)
    V = UnitaryMatrix.random(n, rng).matrix
    M = V @ np.diag(_rand(rng, n)) @ V.conj().T
    U, d = unitary_diagonalize_normal(M)
    assert np.abs(U.matrix @ np.diag(d) @ U.matrix.conj().T - M).max() < 1e-9
    assert np.abs(U.matrix @ U.matrix.conj().T - np.eye(n)).max() < 1e-10


def test_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        UnitaryMatrix(np.array([[1, 1], [0, 1]]))


def test_dense_tensor_checks_declared_symmetry():
    with pytest.raises(ValueError):
        DenseTensor(np.ones((2, 2)), (LOWER, LOWER), antisymmetric=((0, 1),))
    with pytest.raises(ValueError):
        DenseTensor(np.array([np.nan]), (UPPER,))
    with pytest.raises(DimensionMismatch):
        DenseTensor(np.ones((2, 2)), (UPPER,))


def test_identity_frame_change_is_noop(rng):
    T = DenseTensor(_rand(rng, 3, 3, 3), (UPPER, LOWER, BARRED))
    out = change_frame(T, UnitaryMatrix.identity(3))
    np.testing.assert_array_equal(out.data, T.data)


@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_full_contraction_is_invariant(n, seed):
    rng = np.random.default_rng(seed)
    T = DenseTensor(_rand(rng, n, n, n, 2 * n), (UPPER, LOWER, BARRED, DIRECTION))
    out = change_frame(T, UnitaryMatrix.random(n, rng))
    assert abs(out.norm2() - T.norm2()) < 1e-12 * T.norm2()


@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_frame_change_composes(n, seed):
    rng = np.random.default_rng(seed)
    T = DenseTensor(_rand(rng, n, n, 2 * n), (UPPER, BARRED, DIRECTION))
    U, V = UnitaryMatrix.random(n, rng), UnitaryMatrix.random(n, rng)
    lhs = change_frame(T, U @ V).data
    rhs = change_frame(change_frame(T, V), U).data
    assert np.abs(lhs - rhs).max() < 1e-11


def test_upper_lower_pairing_is_invariant(rng):
    v = DenseTensor(_rand(rng, 4), (UPPER,))
    w = DenseTensor(_rand(rng, 4), (LOWER,))
    U = UnitaryMatrix.random(4, rng)
    before = np.sum(v.data * w.data)
    after = np.sum(change_frame(v, U).data * change_frame(w, U).data)
    assert abs(before - after) < 1e-12


def test_frame_change_dimension_mismatch(rng):
    T = DenseTensor(_rand(rng, 3, 3), (UPPER, LOWER))
    with pytest.raises(DimensionMismatch):
        change_frame(T, UnitaryMatrix.identity(2))


def test_lee_vector_norm_survives_rotation(rng):
    # N3 is balanced, so use a non-balanced family member as well
    for S in (catalog.n3_example().S, catalog.family_ab(1, 2).S):
        U = UnitaryMatrix.random(3, rng)
        before = np.linalg.norm(geometry(S).eta)
        after = np.linalg.norm(geometry(transform_structure(S, U)).eta)
        assert abs(before - after) < 1e-12
