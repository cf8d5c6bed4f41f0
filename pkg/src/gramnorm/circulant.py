"""Spectral norm of circular-padding convolutions.

The doubly-block circulant operator of a kernel is block diagonalized by the
2-D DFT, so its largest singular value is the max over the ``n^2`` frequency
blocks ``D[u, v]`` (each ``c_out x c_in``).
"""

import math

import numpy as np

from . import _kernels
from .errors import InvalidArgument, NotConvergedError
from .gram import NormCertificate, _check_iter
from .numerics import as_kernel, fft2_kernel
from .oracle import block_sandwich

_NORM_CODES = {"frobenius": 0, "inf": 1, "one": 2}


def block_bounds(D, n_iter, which_norm="frobenius"):
    """Per-block Gram bounds for a spectrum of shape ``(..., p, q)``.

    Returned in log space (``-inf`` for zero blocks) so callers can combine
    them with further factors without overflow.
    """
    D = np.asarray(D)
    flat = D.reshape((-1,) + D.shape[-2:])
    # per-block max scaling so the first Frobenius norm cannot under/overflow
    m = np.max(np.abs(flat), axis=(1, 2))
    safe = np.where(m > 0, m, 1.0)
    logs = _kernels.block_gram_logs(flat / safe[:, None, None], n_iter, _NORM_CODES[which_norm])
    logs = logs + np.log(safe)
    return logs.reshape(D.shape[:-2])


def norm2_circ(K, n, n_iter):
    """Certified upper bound on sigma_1 of the circular convolution at size ``n``."""
    K = as_kernel(K)
    n_iter = _check_iter(n_iter)
    D = fft2_kernel(K, n)
    logs = block_bounds(D, n_iter)
    best = float(np.max(logs))
    value = 0.0 if best == -math.inf else math.exp(best)
    return NormCertificate(value, n_iter, "circ", True, "frobenius")


def exact_sigma_circ(K, n, tol=1e-10, max_iter=64):
    """Converged reference for sigma_1(C) via per-block sandwich certificates.

    The true value lies in ``[value * (1 - tol), value]``. If some block does
    not reach ``tol`` within ``max_iter`` squarings a
    :class:`NotConvergedError` is raised carrying the partial certificate.
    """
    if not tol > 0:
        raise InvalidArgument(f"tol must be > 0, got {tol}")
    K = as_kernel(K)
    D = fft2_kernel(K, n)
    flat = D.reshape((-1,) + D.shape[2:])
    lower, upper, iters = block_sandwich(flat, tol=tol, max_iter=max_iter)
    value = float(np.max(upper))
    cert = NormCertificate(value, iters, "sandwich", True, "frobenius")
    best_lower = float(np.max(lower))
    if value > 0 and (value - best_lower) / value > tol:
        raise NotConvergedError(
            f"circulant sandwich gap {(value - best_lower) / value:.3e} above tol={tol} "
            f"after {iters} squarings",
            cert,
        )
    return cert
