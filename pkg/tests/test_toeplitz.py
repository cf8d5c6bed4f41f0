import numpy as np
import pytest

from gramnorm import finite_diff_grad, kernel_gram_step, materialize_toeplitz, norm2_toep, InvalidArgument
from gramnorm.oracle import conv_operator, sigma1_lanczos_lower
from gramnorm.toeplitz import DIRECT_TAPS_LIMIT, _fft_correlate, norm2_toep_sequence

from conftest import averaging_kernel, svd_sigma1


def naive_gram_step(K):
    """Full cross-correlation by explicit loops over valid overlaps."""
    co, ci, kh, kw = K.shape
    out = np.zeros((ci, ci, 2 * kh - 1, 2 * kw - 1))
    for i1 in range(ci):
        for i2 in range(ci):
            for p in range(-(kh - 1), kh):
                for q in range(-(kw - 1), kw):
                    s = 0.0
                    for j in range(co):
                        for a in range(kh):
                            for b in range(kw):
                                if 0 <= a + p < kh and 0 <= b + q < kw:
                                    s += K[j, i1, a, b] * K[j, i2, a + p, b + q]
                    out[i1, i2, p + kh - 1, q + kw - 1] = s
    return out


def test_gram_step_examples():
    assert kernel_gram_step(np.array([[[[3.0]]]])).tolist() == [[[[9.0]]]]
    np.testing.assert_allclose(kernel_gram_step(np.array([[[[2.0, 5.0]]]])), [[[[10.0, 29.0, 10.0]]]])


@pytest.mark.parametrize("shape", [(3, 2, 3, 3), (1, 4, 2, 5), (2, 2, 1, 1)])
def test_gram_step_matches_loops(rng, shape):
    K = rng.standard_normal(shape)
    np.testing.assert_allclose(kernel_gram_step(K), naive_gram_step(K), atol=1e-12)


def test_gram_step_hermitian_shift_symmetry(rng):
    G = kernel_gram_step(rng.standard_normal((3, 2, 3, 3)))
    assert G.shape == (2, 2, 5, 5)
    np.testing.assert_allclose(G, np.transpose(G, (1, 0, 2, 3))[:, :, ::-1, ::-1], atol=1e-12)


def test_fft_correlation_matches_direct(rng):
    A = rng.standard_normal((2, 2, 19, 19))
    assert 19 * 19 > DIRECT_TAPS_LIMIT
    np.testing.assert_allclose(_fft_correlate(A), naive_gram_step(A), atol=1e-10)


def test_one_by_one_kernel():
    for t in (1, 4, 9):
        assert norm2_toep(np.array([[[[3.0]]]]), t).value == pytest.approx(3.0, rel=1e-14)


def test_averaging_kernel_inf_is_one():
    for t in (1, 2, 5):
        assert norm2_toep(averaging_kernel(), t).value == pytest.approx(1.0, rel=1e-12)


def test_zero_kernel():
    assert norm2_toep(np.zeros((2, 2, 3, 3)), 3).value == 0.0
    assert [c.value for c in norm2_toep_sequence(np.zeros((1, 1, 3, 3)), 3)] == [0.0] * 3


def test_invalid():
    with pytest.raises(InvalidArgument):
        norm2_toep(np.ones((1, 1, 3, 3)), 2, "two")
    with pytest.raises(InvalidArgument):
        norm2_toep(np.full((1, 1, 3, 3), np.nan), 2)


@pytest.mark.parametrize("variant", ["inf", "fro"])
def test_upper_bound_all_sizes(rng, variant):
    K = rng.standard_normal((4, 4, 3, 3))
    cert = norm2_toep(K, 6, variant)
    assert cert.is_upper_bound
    for n in (8, 16):
        assert cert.value >= svd_sigma1(materialize_toeplitz(K, n)) * (1 - 1e-9)
    assert cert.value >= sigma1_lanczos_lower(conv_operator(K, 32, "zero")) * (1 - 1e-9)


def test_sequence_matches_single_calls(rng):
    K = rng.standard_normal((2, 3, 3, 3))
    for variant in ("inf", "fro", "fro-literal"):
        seq = norm2_toep_sequence(K, 4, variant)
        for c in seq:
            assert c.value == pytest.approx(norm2_toep(K, c.iterations, variant).value, rel=1e-13)


def test_fro_literal_is_not_an_upper_bound():
    # the original-support factor drops below sigma_1 once the Gram kernel grows
    K = np.random.default_rng(0).standard_normal((2, 2, 5, 5))
    literal = norm2_toep(K, 3, "fro-literal")
    lower = sigma1_lanczos_lower(conv_operator(K, 32, "zero"))
    assert not literal.is_upper_bound
    assert literal.value < lower
    assert norm2_toep(K, 3, "fro").value >= lower


@pytest.mark.parametrize("variant", ["inf", "fro"])
def test_smoothness_probe(variant):
    K = np.random.default_rng(7).standard_normal((2, 2, 3, 3))
    f = lambda k: norm2_toep(k, 4, variant).value
    g1 = finite_diff_grad(f, K, 1e-6)
    g2 = finite_diff_grad(f, K, 5e-7)
    assert g1.nan_count == 0 and g2.nan_count == 0
    np.testing.assert_allclose(g1.grad, g2.grad, rtol=1e-3, atol=1e-3 * g1.max_abs)
