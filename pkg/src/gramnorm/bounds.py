"""Correction factors for sub-sampled frequency grids.

The Gram-iterated block norms sampled on an ``n0 x n0`` frequency grid bound
the continuous-frequency symbol only after multiplication by
``(1 / (1 - alpha))^(2^-t)``, ``alpha = 2^t floor(k/2) / n0``. That lets a
coarse grid certify circular convolutions at any larger size, and zero-padding
convolutions at the grid size itself.
"""

import math
from dataclasses import dataclass

import numpy as np

from .circulant import block_bounds
from .errors import InvalidArgument, PreconditionError
from .gram import NormCertificate, _check_iter
from .numerics import as_kernel, fft2_kernel


@dataclass(frozen=True)
class FactorParams:
    k: int
    t: int
    n0: int
    alpha: float
    factor: float
    strict: bool = False


def _degree_terms(k, t, strict):
    """Return ``(numerator, exponent)`` with ``alpha = numerator / n0``.

    Default: numerator ``2^t floor(k/2)``, exponent ``2^-t``. Strict: the squared
    Frobenius norm of the ``t``-th block iterate is a trigonometric polynomial of
    degree ``d = 2^(t+1) floor(k/2)``; the sampling inequality then needs
    ``alpha = 2d / n0`` and the factor is taken to the power ``2^-(t+1)``.
    """
    half = k // 2
    if strict:
        return 2 * (2 ** (t + 1)) * half, 2.0 ** (-(t + 1))
    return (2**t) * half, 2.0 ** (-t)


def min_admissible_n0(k, t, strict=False):
    num, _ = _degree_terms(int(k), int(t), strict)
    return num + 1


def correction_factor(k, t, n0, strict=False):
    """Closed-form factor for kernel side ``k``, ``t`` Gram passes, grid ``n0``."""
    for name, val in (("k", k), ("t", t), ("n0", n0)):
        if int(val) != val or val < 1:
            raise InvalidArgument(f"{name} must be an integer >= 1, got {val}")
    k, t, n0 = int(k), int(t), int(n0)
    num, expo = _degree_terms(k, t, strict)
    # exact integer admissibility check
    if n0 < num + 1:
        raise PreconditionError(
            f"n0={n0} too small for k={k}, t={t}: minimal admissible n0 is {num + 1}"
        )
    alpha = num / n0
    factor = (1.0 / (1.0 - alpha)) ** expo
    return FactorParams(k, t, n0, alpha, factor, strict)


def spectral_density(K, w1, w2):
    """Continuous-frequency symbol ``E(w1, w2) = sum e^{-i k1 w1} e^{-i k2 w2} K[:, :, k1, k2]``."""
    K = as_kernel(K)
    kh, kw = K.shape[2:]
    e1 = np.exp(-1j * w1 * np.arange(kh))
    e2 = np.exp(-1j * w2 * np.arange(kw))
    return np.einsum("a,b,jiab->ji", e1, e2, K)


def _kernel_side(K):
    return max(K.shape[2], K.shape[3])


def bound_lower_input(K, n0, n_iter, strict=False):
    """Upper bound on sigma_1 of the circular convolution at every size, from an ``n0`` grid."""
    K = as_kernel(K)
    n_iter = _check_iter(n_iter)
    fp = correction_factor(_kernel_side(K), n_iter, n0, strict)
    logs = block_bounds(fft2_kernel(K, n0), n_iter)
    best = float(np.max(logs))
    value = 0.0 if best == -math.inf else fp.factor * math.exp(best)
    return NormCertificate(value, n_iter, "circ-approx", True, "frobenius")


def bound_toeplitz_via_circ(K, n, n_iter, strict=False):
    """Upper bound on sigma_1 of the zero-padding convolution at size ``n`` via the circulant grid."""
    return bound_lower_input(K, n, n_iter, strict)


def figure1_curve(n0_min, n0_max, k, t_list, strict=False):
    """Closed-form factor curves.

    Returns ``(rows, omitted)``: ``rows`` holds dicts with keys
    ``n0, k, t, alpha, factor`` for admissible points, ``omitted`` lists the
    ``(n0, t)`` pairs skipped for violating the precondition.
    """
    t_list = list(t_list)
    if not t_list:
        raise InvalidArgument("t_list must not be empty")
    if n0_min < 1 or n0_max < n0_min:
        raise InvalidArgument(f"bad n0 range [{n0_min}, {n0_max}]")
    rows, omitted = [], []
    for t in t_list:
        for n0 in range(int(n0_min), int(n0_max) + 1):
            try:
                fp = correction_factor(k, t, n0, strict)
            except PreconditionError:
                omitted.append((n0, t))
                continue
            rows.append({"n0": n0, "k": fp.k, "t": t, "alpha": fp.alpha, "factor": fp.factor})
    return rows, omitted
