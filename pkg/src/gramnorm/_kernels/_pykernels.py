"""Pure numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used when
the extension is not built or when selected explicitly.
"""

import numpy as np

_NORM_CODES = {0: "frobenius", 1: "inf", 2: "one"}


def gram_correlate(A):
    """Full cross-correlation Gram of a 4-D kernel.

    ``out[i1, i2, p + kh - 1, q + kw - 1] = sum_j sum_{a,b} A[j,i1,a,b] * A[j,i2,a+p,b+q]``
    over all ``(a, b)`` where both entries exist.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    _, m, kh, kw = A.shape
    out = np.zeros((m, m, 2 * kh - 1, 2 * kw - 1))
    for p in range(-(kh - 1), kh):
        a0, a1 = max(0, -p), min(kh, kh - p)
        for q in range(-(kw - 1), kw):
            b0, b1 = max(0, -q), min(kw, kw - q)
            left = A[:, :, a0:a1, b0:b1]
            right = A[:, :, a0 + p:a1 + p, b0 + q:b1 + q]
            out[:, :, p + kh - 1, q + kw - 1] = np.einsum("jiab,jkab->ik", left, right)
    return out


def _block_norms(G, code):
    a = np.abs(G)
    if code == 0:
        return np.sqrt(np.sum(a * a, axis=(1, 2)))
    if code == 1:
        return np.max(np.sum(a, axis=2), axis=1)
    return np.max(np.sum(a, axis=1), axis=1)


def block_gram_logs(D, n_iter, norm_code=0):
    """Per-block Gram iteration in log space.

    ``D`` has shape ``(B, p, q)``. Returns ``log`` of
    ``||G_b||^(2^-n_iter) * exp(2^-n_iter * r_b)`` for every block; zero blocks
    give ``-inf``.
    """
    G = np.array(D, dtype=np.complex128, copy=True)
    B = G.shape[0]
    r = np.zeros(B)
    alive = np.ones(B, dtype=bool)
    for _ in range(int(n_iter)):
        fro = np.sqrt(np.sum(G.real ** 2 + G.imag ** 2, axis=(1, 2)))
        alive &= fro > 0
        safe = np.where(alive, fro, 1.0)
        r = 2.0 * (r + np.log(safe))
        G = G / safe[:, None, None]
        G = np.matmul(np.conj(np.swapaxes(G, 1, 2)), G)
    final = _block_norms(G, norm_code)
    scale = 2.0 ** (-int(n_iter))
    with np.errstate(divide="ignore"):
        logs = scale * (np.log(final) + r)
    logs[~alive] = -np.inf
    return logs


def conv2d(K, X, circular):
    """Multichannel "same" cross-correlation.

    ``Y[j, x, y] = sum_i sum_{a,b} K[j,i,a,b] * X[i, x+a-kh//2, y+b-kw//2]``
    with zeros outside the image, or wrap-around when ``circular``.
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    co, ci, kh, kw = K.shape
    _, n, m = X.shape
    hh, hw = kh // 2, kw // 2
    Y = np.zeros((co, n, m))
    for a in range(kh):
        da = a - hh
        for b in range(kw):
            db = b - hw
            Kab = K[:, :, a, b]
            if circular:
                shifted = np.roll(X, shift=(-da, -db), axis=(1, 2))
                Y += np.tensordot(Kab, shifted, axes=(1, 0))
            else:
                x0, x1 = max(0, -da), min(n, n - da)
                y0, y1 = max(0, -db), min(m, m - db)
                if x0 >= x1 or y0 >= y1:
                    continue
                Y[:, x0:x1, y0:y1] += np.tensordot(
                    Kab, X[:, x0 + da:x1 + da, y0 + db:y1 + db], axes=(1, 0)
                )
    return Y


def conv2d_transpose(K, Y, circular):
    """Adjoint of :func:`conv2d` with respect to the Euclidean inner product."""
    K = np.ascontiguousarray(K, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    co, ci, kh, kw = K.shape
    _, n, m = Y.shape
    hh, hw = kh // 2, kw // 2
    X = np.zeros((ci, n, m))
    for a in range(kh):
        da = a - hh
        for b in range(kw):
            db = b - hw
            KabT = K[:, :, a, b].T
            if circular:
                contrib = np.tensordot(KabT, Y, axes=(1, 0))
                X += np.roll(contrib, shift=(da, db), axis=(1, 2))
            else:
                x0, x1 = max(0, -da), min(n, n - da)
                y0, y1 = max(0, -db), min(m, m - db)
                if x0 >= x1 or y0 >= y1:
                    continue
                X[:, x0 + da:x1 + da, y0 + db:y1 + db] += np.tensordot(
                    KabT, Y[:, x0:x1, y0:y1], axes=(1, 0)
                )
    return X
