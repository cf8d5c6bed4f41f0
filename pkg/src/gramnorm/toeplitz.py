"""Spectral-norm bound for zero-padding convolutions.

The Gram iterate of the (bi-infinite) zero-padding operator is again a
convolution, whose kernel is the channel-summed full cross-correlation of the
previous kernel with itself. Iterating on kernels keeps the cost independent
of the image size, and the resulting bound holds for every input size.
"""

import math

import numpy as np
from scipy import fft as sfft

from . import _kernels
from .errors import InvalidArgument
from .gram import NormCertificate, _check_iter
from .numerics import as_kernel, fro_norm

# above this many spatial taps the direct correlation loses to FFTs
DIRECT_TAPS_LIMIT = 17 * 17


def _fft_correlate(A):
    mo, m, kh, kw = A.shape
    oh, ow = 2 * kh - 1, 2 * kw - 1
    sh, sw = sfft.next_fast_len(oh, real=True), sfft.next_fast_len(ow, real=True)
    F = sfft.rfft2(A, s=(sh, sw), axes=(2, 3))
    # correlation sum_a x[a] y[a+p] <-> conj(X) Y
    P = np.einsum("jauv,jbuv->abuv", np.conj(F), F, optimize=True)
    full = sfft.irfft2(P, s=(sh, sw), axes=(2, 3))
    rows = np.arange(-(kh - 1), kh) % sh
    cols = np.arange(-(kw - 1), kw) % sw
    out = full[:, :, rows][:, :, :, cols]
    # exact symmetrization removes the O(eps) asymmetry of the FFT round trip
    return 0.5 * (out + np.transpose(out, (1, 0, 2, 3))[:, :, ::-1, ::-1])


def kernel_gram_step(K):
    """One Gram step on a kernel.

    ``out[i1, i2, p, q] = sum_j sum_{a,b} K[j,i1,a,b] K[j,i2,a+p,b+q]`` with the
    shift ``(p, q)`` stored at index ``(p + k_h - 1, q + k_w - 1)``. Input shape
    ``(a, m, k_h, k_w)`` becomes ``(m, m, 2k_h - 1, 2k_w - 1)``.
    """
    K = as_kernel(K)
    if K.shape[2] * K.shape[3] <= DIRECT_TAPS_LIMIT:
        return _kernels.gram_correlate(K)
    return _fft_correlate(K)


def gram_kernel_iterate(K, n_iter):
    """Run ``n_iter`` rescaled kernel Gram steps.

    Returns ``(G, r)`` with the true iterate equal to ``exp(r) * G``; ``G`` is
    None when the kernel is zero.
    """
    K = as_kernel(K)
    r = 0.0
    for _ in range(n_iter):
        fro = fro_norm(K)
        if fro == 0.0:
            return None, 0.0
        r = 2.0 * (r + math.log(fro))
        K = kernel_gram_step(K / fro)
    return K, r


VARIANTS = ("inf", "fro", "fro-literal")


def _check_variant(variant):
    if variant not in VARIANTS:
        raise InvalidArgument(f"variant must be one of {VARIANTS}, got {variant!r}")


def _toep_value(G, r, n_iter, variant, taps0):
    scale = 2.0 ** (-n_iter)
    if variant == "inf":
        col_sums = np.sum(np.abs(G), axis=(0, 2, 3))
        s = float(np.max(col_sums))
        return 0.0 if s == 0 else math.exp(scale * (math.log(s) + r))
    # sup_w ||symbol||_F <= sqrt(taps * sum |G|^2) by Cauchy-Schwarz over the taps
    taps = G.shape[2] * G.shape[3] if variant == "fro" else taps0
    sq = taps * float(np.sum(G * G))
    return 0.0 if sq == 0 else math.exp(0.5 * scale * math.log(sq) + scale * r)


def _certificate(value, n_iter, variant):
    if variant == "inf":
        return NormCertificate(value, n_iter, "toep-inf", True, "inf")
    return NormCertificate(value, n_iter, "toep-fro", variant == "fro", "frobenius")


def norm2_toep(K, n_iter, variant="inf"):
    """Size-independent upper bound on sigma_1 of the zero-padding convolution.

    Variants, applied to the final Gram kernel ``G``:

    ``"inf"``
        max absolute column sum (channel and spatial).
    ``"fro"``
        ``sqrt(taps(G) * ||G||_F^2)`` where ``taps(G)`` is the spatial support of
        ``G``, which grows with ``n_iter``.
    ``"fro-literal"``
        same with the support of the *original* kernel. Kept for comparison
        only: it drops below sigma_1 once the Gram kernel outgrows the original
        support, so the certificate is flagged ``is_upper_bound=False``.
    """
    _check_variant(variant)
    K = as_kernel(K)
    n_iter = _check_iter(n_iter)
    G, r = gram_kernel_iterate(K, n_iter)
    value = 0.0 if G is None else _toep_value(G, r, n_iter, variant, K.shape[2] * K.shape[3])
    return _certificate(value, n_iter, variant)


def norm2_toep_sequence(K, t_max, variant="inf"):
    """``norm2_toep`` for every ``n_iter`` in ``1..t_max`` from one pass."""
    _check_variant(variant)
    K = as_kernel(K)
    t_max = _check_iter(t_max, "t_max")
    taps0 = K.shape[2] * K.shape[3]
    out = []
    G, r = K, 0.0
    for t in range(1, t_max + 1):
        fro = fro_norm(G) if G is not None else 0.0
        if fro == 0.0:
            G = None
            value = 0.0
        else:
            r = 2.0 * (r + math.log(fro))
            G = kernel_gram_step(G / fro)
            value = _toep_value(G, r, t, variant, taps0)
        out.append(_certificate(value, t, variant))
    return out
