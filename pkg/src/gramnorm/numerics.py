"""Dense matrix substrate, DFT helpers and matrix norms.

Matrices are plain 2-D numpy arrays (float64 or complex128). Convolution
kernels are 4-D float64 arrays laid out as ``(c_out, c_in, k_h, k_w)``.
A block spectrum is a complex array of shape ``(n, n, c_out, c_in)`` whose
entry ``[u, v]`` is the ``c_out x c_in`` matrix at frequency pair ``(u, v)``.
"""

import numpy as np

from .errors import InvalidArgument

NORMS = ("frobenius", "inf", "one")


def as_matrix(M, name="matrix"):
    """Validate ``M`` and return it as a 2-D float64/complex128 array."""
    arr = np.asarray(M)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidArgument(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} contains NaN or Inf entries")
    return arr


def as_kernel(K, name="kernel"):
    """Validate ``K`` and return it as a C-contiguous float64 4-D array."""
    arr = np.asarray(K)
    if np.iscomplexobj(arr):
        raise InvalidArgument(f"{name} must be real")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if arr.ndim != 4 or min(arr.shape) < 1:
        raise InvalidArgument(
            f"{name} must have shape (c_out, c_in, k_h, k_w) with all sizes >= 1, "
            f"got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} contains NaN or Inf entries")
    return arr


def dft_matrix(n):
    """Unnormalized DFT matrix ``U[u, v] = exp(-2j*pi*u*v/n)``, 0-based.

    The inverse is ``U.conj().T / n``.
    """
    n = int(n)
    if n < 1:
        raise InvalidArgument(f"DFT size must be >= 1, got {n}")
    idx = np.arange(n)
    # reduce u*v mod n in integers first so the phase stays accurate for large n
    phase = (np.outer(idx, idx) % n) * (-2.0 * np.pi / n)
    return np.exp(1j * phase)


def fft2_kernel(K, n):
    """Block spectrum of ``K`` zero-padded to ``n x n``.

    Returns an array ``D`` of shape ``(n, n, c_out, c_in)`` with
    ``D[u, v] = sum_{k1, k2} exp(-2i pi k1 u / n) exp(-2i pi k2 v / n) K[:, :, k1, k2]``.
    Only the first ``k_h`` (resp. ``k_w``) DFT columns are needed, so the cost
    is ``O(n^2 k^2 c_out c_in)`` and any ``n`` is handled exactly.
    """
    K = as_kernel(K)
    n = int(n)
    kh, kw = K.shape[2:]
    if n < max(kh, kw):
        raise InvalidArgument(
            f"sampling size n={n} is smaller than the kernel spatial size {kh}x{kw}"
        )
    U = dft_matrix(n)
    return np.einsum("ua,vb,jiab->uvji", U[:, :kh], U[:, :kw], K, optimize=True)


def fro_norm(A, axis=None):
    """Frobenius norm over ``axis`` (all axes by default), scaled by the max entry.

    Squaring raw entries under- or overflows outside roughly 1e-154..1e154;
    dividing by the largest magnitude first keeps every square in [0, 1].
    """
    A = np.abs(np.asarray(A))
    if A.size == 0:
        return 0.0 if axis is None else np.zeros(np.delete(A.shape, axis))
    m = np.max(A, axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    out = np.squeeze(m, axis=axis) * np.sqrt(np.sum((A / safe) ** 2, axis=axis))
    return float(out) if axis is None else out


def matrix_norm(M, which="frobenius"):
    """Frobenius, max-row-sum (``inf``) or max-column-sum (``one``) norm."""
    M = np.asarray(M)
    if M.ndim != 2:
        raise InvalidArgument(f"expected a 2-D array, got shape {M.shape}")
    if which == "frobenius":
        return fro_norm(M)
    if which == "inf":
        return float(np.max(np.sum(np.abs(M), axis=1)))
    if which == "one":
        return float(np.max(np.sum(np.abs(M), axis=0)))
    raise InvalidArgument(f"unknown norm {which!r}; expected one of {NORMS}")
