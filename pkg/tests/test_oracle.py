import numpy as np
import pytest

from gramnorm import (InvalidArgument, MemoryCapError, conv_power_iteration, finite_diff_grad,
                      materialize_circulant, materialize_toeplitz, sigma1_sandwich)
from gramnorm.oracle import block_sandwich, conv_operator, sigma1_lanczos_lower

from conftest import naive_conv, svd_sigma1


@pytest.mark.parametrize("circular", [False, True])
def test_materialized_matches_direct_conv(rng, circular):
    K = rng.standard_normal((2, 3, 3, 3))
    X = rng.standard_normal((3, 5, 5))
    M = (materialize_circulant if circular else materialize_toeplitz)(K, 5)
    assert M.shape == (2 * 25, 3 * 25)
    np.testing.assert_allclose(M @ X.ravel(), naive_conv(K, X, circular).ravel(), atol=1e-12)


def test_materialize_rejects_even_and_cap(rng):
    with pytest.raises(InvalidArgument):
        materialize_toeplitz(rng.standard_normal((1, 1, 2, 2)), 4)
    with pytest.raises(MemoryCapError):
        materialize_toeplitz(rng.standard_normal((4, 4, 3, 3)), 32, element_cap=1000)


def test_sandwich_brackets_svd(rng):
    for shape in [(5, 5), (7, 3), (3, 9), (1, 1), (40, 30)]:
        M = rng.standard_normal(shape)
        cert = sigma1_sandwich(M, tol=1e-12)
        s = svd_sigma1(M)
        assert cert.converged
        assert cert.lower <= s * (1 + 1e-12) and cert.upper >= s * (1 - 1e-12)
        assert cert.gap <= 1e-12


def test_sandwich_degenerate_spectrum():
    cert = sigma1_sandwich(np.eye(6) * 2.0)
    assert cert.lower == pytest.approx(2.0) and cert.upper == pytest.approx(2.0)
    zero = sigma1_sandwich(np.zeros((3, 3)))
    assert zero.lower == zero.upper == 0.0


def test_sandwich_rejects_bad_tol():
    with pytest.raises(InvalidArgument):
        sigma1_sandwich(np.eye(2), tol=0)


def test_block_sandwich_each(rng):
    A = rng.standard_normal((6, 3, 4)) + 1j * rng.standard_normal((6, 3, 4))
    A[2] *= 1e-150
    lo, up, _ = block_sandwich(A, tol=1e-12, criterion="each")
    exact = np.array([svd_sigma1(a) for a in A])
    np.testing.assert_allclose(lo, exact, rtol=1e-10)
    np.testing.assert_allclose(up, exact, rtol=1e-10)


def test_lanczos_lower(rng):
    K = rng.standard_normal((2, 2, 3, 3))
    s = svd_sigma1(materialize_toeplitz(K, 8))
    low = sigma1_lanczos_lower(conv_operator(K, 8))
    assert low <= s * (1 + 1e-12) and low == pytest.approx(s, rel=1e-9)
    tiny = sigma1_lanczos_lower(np.array([[3.0, 0.0], [0.0, 1.0]]))
    assert tiny == pytest.approx(3.0)


def test_power_iteration_is_lower_side(rng):
    K = rng.standard_normal((3, 3, 3, 3))
    cert = conv_power_iteration(K, 8, "circular", iters=20)
    s = svd_sigma1(materialize_circulant(K, 8))
    assert not cert.is_upper_bound
    assert cert.value <= s * (1 + 1e-12)
    assert conv_power_iteration(K, 8, iters=500).value == pytest.approx(
        svd_sigma1(materialize_toeplitz(K, 8)), rel=1e-6)


def test_finite_diff_on_quadratic(rng):
    K = rng.standard_normal((1, 2, 3, 3))
    res = finite_diff_grad(lambda k: float(np.sum(k**2)), K)
    np.testing.assert_allclose(res.grad, 2 * K, atol=1e-7)
    assert res.nan_count == 0
    with pytest.raises(InvalidArgument):
        finite_diff_grad(np.sum, K, eps=0)
