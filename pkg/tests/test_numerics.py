import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gramnorm import InvalidArgument, dft_matrix, fft2_kernel, matrix_norm
from gramnorm.numerics import as_kernel, as_matrix

from conftest import naive_block


def test_dft_small_cases():
    np.testing.assert_array_equal(dft_matrix(1), [[1.0]])
    np.testing.assert_allclose(dft_matrix(2), [[1, 1], [1, -1]], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7, 16, 33, 64])
def test_dft_inverse_is_scaled_adjoint(n):
    U = dft_matrix(n)
    np.testing.assert_allclose(U @ U.conj().T / n, np.eye(n), atol=1e-12)


def test_dft_rejects_zero():
    with pytest.raises(InvalidArgument):
        dft_matrix(0)


def test_fft2_constant_symbol():
    D = fft2_kernel(np.full((1, 1, 1, 1), 2.5), 4)
    assert D.shape == (4, 4, 1, 1)
    np.testing.assert_allclose(D, 2.5, atol=1e-15)


def test_fft2_corner_delta_is_all_ones():
    K = np.zeros((1, 1, 3, 3))
    K[0, 0, 0, 0] = 1.0
    np.testing.assert_allclose(fft2_kernel(K, 8), 1.0, atol=1e-15)


@pytest.mark.parametrize("shape,n", [((2, 3, 3, 3), 5), ((1, 2, 2, 3), 4), ((3, 1, 5, 5), 16)])
def test_fft2_matches_naive_double_sum(rng, shape, n):
    K = rng.standard_normal(shape)
    D = fft2_kernel(K, n)
    for u in range(n):
        for v in range(n):
            np.testing.assert_allclose(D[u, v], naive_block(K, n, u, v), atol=1e-12)


def test_fft2_matches_zero_padded_numpy_fft(rng):
    K = rng.standard_normal((2, 2, 3, 3))
    padded = np.zeros((2, 2, 12, 12))
    padded[:, :, :3, :3] = K
    ref = np.fft.fft2(padded, axes=(2, 3)).transpose(2, 3, 0, 1)
    np.testing.assert_allclose(fft2_kernel(K, 12), ref, atol=1e-12)


def test_fft2_rejects_small_grid(rng):
    with pytest.raises(InvalidArgument):
        fft2_kernel(rng.standard_normal((1, 1, 5, 5)), 4)


def test_matrix_norm_examples():
    assert matrix_norm(np.array([[3.0, 4.0]])) == 5.0
    assert matrix_norm(np.array([[1.0, -2.0], [3.0, 0.0]]), "inf") == 3.0
    assert matrix_norm(np.array([[1.0, -2.0], [3.0, 0.0]]), "one") == 4.0
    assert matrix_norm(np.eye(9)) == pytest.approx(3.0)
    with pytest.raises(InvalidArgument):
        matrix_norm(np.eye(2), "nuclear")


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 5), st.integers(1, 5), st.integers(0, 1000),
)
def test_frobenius_monotone_under_zeroing(p, q, seed):
    M = np.random.default_rng(seed).standard_normal((p, q))
    before = matrix_norm(M)
    M[seed % p, seed % q] = 0.0
    assert matrix_norm(M) <= before


def test_validation_rejects_nan_and_bad_shapes():
    with pytest.raises(InvalidArgument):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(InvalidArgument):
        as_matrix([1.0, 2.0])
    with pytest.raises(InvalidArgument):
        as_kernel(np.zeros((1, 1, 3)))
    with pytest.raises(InvalidArgument):
        as_kernel(np.full((1, 1, 1, 1), np.inf))
