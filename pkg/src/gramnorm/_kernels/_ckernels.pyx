# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_pykernels`` for the reference)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, INFINITY

cnp.import_array()


def gram_correlate(A_in):
    cdef double[:, :, :, ::1] A = np.ascontiguousarray(A_in, dtype=np.float64)
    cdef Py_ssize_t mo = A.shape[0], m = A.shape[1], kh = A.shape[2], kw = A.shape[3]
    out_arr = np.zeros((m, m, 2 * kh - 1, 2 * kw - 1))
    cdef double[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t i1, i2, j, a, b, p, q, a0, a1, b0, b1
    cdef double s
    for i1 in range(m):
        for i2 in range(i1, m):
            for p in range(-(kh - 1), kh):
                a0 = -p if p < 0 else 0
                a1 = kh - p if p > 0 else kh
                for q in range(-(kw - 1), kw):
                    b0 = -q if q < 0 else 0
                    b1 = kw - q if q > 0 else kw
                    s = 0.0
                    for j in range(mo):
                        for a in range(a0, a1):
                            for b in range(b0, b1):
                                s += A[j, i1, a, b] * A[j, i2, a + p, b + q]
                    out[i1, i2, p + kh - 1, q + kw - 1] = s
                    # Hermitian shift symmetry
                    out[i2, i1, kh - 1 - p, kw - 1 - q] = s
    return out_arr


cdef double _block_norm(double complex[:, ::1] G, Py_ssize_t n, int code):
    cdef Py_ssize_t i, j
    cdef double s, best = 0.0, v
    if code == 0:
        s = 0.0
        for i in range(n):
            for j in range(n):
                s += G[i, j].real * G[i, j].real + G[i, j].imag * G[i, j].imag
        return sqrt(s)
    for i in range(n):
        s = 0.0
        for j in range(n):
            if code == 1:
                v = abs(G[i, j])
            else:
                v = abs(G[j, i])
            s += v
        if s > best:
            best = s
    return best


def block_gram_logs(D_in, int n_iter, int norm_code=0):
    cdef double complex[:, :, ::1] D = np.ascontiguousarray(D_in, dtype=np.complex128)
    cdef Py_ssize_t B = D.shape[0], p = D.shape[1], q = D.shape[2]
    logs_arr = np.empty(B)
    cdef double[::1] logs = logs_arr
    work_arr = np.empty((p, q), dtype=np.complex128)
    cur_arr = np.empty((q, q), dtype=np.complex128)
    nxt_arr = np.empty((q, q), dtype=np.complex128)
    cdef double complex[:, ::1] work = work_arr
    cdef double complex[:, ::1] cur = cur_arr
    cdef double complex[:, ::1] nxt = nxt_arr
    cdef double complex[:, ::1] tmp
    cdef Py_ssize_t blk, it, i, j, l
    cdef double r, fro, scale = 1.0
    cdef double complex s
    cdef bint zero
    for it in range(n_iter):
        scale *= 0.5
    for blk in range(B):
        r = 0.0
        zero = False
        for i in range(p):
            for j in range(q):
                work[i, j] = D[blk, i, j]
        for it in range(n_iter):
            fro = 0.0
            if it == 0:
                for i in range(p):
                    for j in range(q):
                        fro += work[i, j].real * work[i, j].real + work[i, j].imag * work[i, j].imag
            else:
                for i in range(q):
                    for j in range(q):
                        fro += cur[i, j].real * cur[i, j].real + cur[i, j].imag * cur[i, j].imag
            fro = sqrt(fro)
            if fro == 0.0:
                zero = True
                break
            r = 2.0 * (r + log(fro))
            # next = (X / fro)^* (X / fro), X is work (p x q) on the first pass
            for i in range(q):
                for j in range(q):
                    s = 0.0
                    if it == 0:
                        for l in range(p):
                            s += (work[l, i].conjugate()) * work[l, j]
                    else:
                        for l in range(q):
                            s += (cur[l, i].conjugate()) * cur[l, j]
                    nxt[i, j] = s / (fro * fro)
            tmp = cur
            cur = nxt
            nxt = tmp
        if zero:
            logs[blk] = -INFINITY
        else:
            fro = _block_norm(cur, q, norm_code)
            logs[blk] = scale * (log(fro) + r) if fro > 0 else -INFINITY
    return logs_arr


cdef inline Py_ssize_t _segments(Py_ssize_t d, Py_ssize_t n, bint circular,
                                 Py_ssize_t* lo, Py_ssize_t* hi, Py_ssize_t* off) noexcept nogil:
    """Split ``x -> x + d`` on ``[0, n)`` into runs with a constant source offset."""
    cdef Py_ssize_t cnt = 0
    if d >= n or d <= -n:
        if not circular:
            return 0
        d = ((d % n) + n) % n
    if d >= 0:
        lo[cnt] = 0; hi[cnt] = n - d; off[cnt] = d; cnt += 1
        if circular and d > 0:
            lo[cnt] = n - d; hi[cnt] = n; off[cnt] = d - n; cnt += 1
    else:
        lo[cnt] = -d; hi[cnt] = n; off[cnt] = d; cnt += 1
        if circular:
            lo[cnt] = 0; hi[cnt] = -d; off[cnt] = d + n; cnt += 1
    return cnt


cdef void _shift_acc(double[:, ::1] dst, double[:, ::1] src, double w,
                     Py_ssize_t dx, Py_ssize_t dy, bint circular) noexcept nogil:
    """``dst[x, y] += w * src[x + dx, y + dy]`` over valid (or wrapped) positions."""
    cdef Py_ssize_t n = dst.shape[0], m = dst.shape[1]
    cdef Py_ssize_t xlo[2], xhi[2], xoff[2], ylo[2], yhi[2], yoff[2]
    cdef Py_ssize_t nx = _segments(dx, n, circular, xlo, xhi, xoff)
    cdef Py_ssize_t ny = _segments(dy, m, circular, ylo, yhi, yoff)
    cdef Py_ssize_t sx, sy, x, y, xs, ox
    cdef double* drow
    cdef double* srow
    for sx in range(nx):
        ox = xoff[sx]
        for x in range(xlo[sx], xhi[sx]):
            drow = &dst[x, 0]
            srow = &src[x + ox, 0]
            for sy in range(ny):
                for y in range(ylo[sy], yhi[sy]):
                    drow[y] += w * srow[y + yoff[sy]]


def conv2d(K_in, X_in, bint circular):
    cdef double[:, :, :, ::1] K = np.ascontiguousarray(K_in, dtype=np.float64)
    cdef double[:, :, ::1] X = np.ascontiguousarray(X_in, dtype=np.float64)
    cdef Py_ssize_t co = K.shape[0], ci = K.shape[1], kh = K.shape[2], kw = K.shape[3]
    cdef Py_ssize_t n = X.shape[1], m = X.shape[2]
    cdef Py_ssize_t hh = kh // 2, hw = kw // 2
    Y_arr = np.zeros((co, n, m))
    cdef double[:, :, ::1] Y = Y_arr
    cdef Py_ssize_t j, i, a, b
    with nogil:
        for j in range(co):
            for i in range(ci):
                for a in range(kh):
                    for b in range(kw):
                        if K[j, i, a, b] != 0.0:
                            _shift_acc(Y[j], X[i], K[j, i, a, b], a - hh, b - hw, circular)
    return Y_arr


def conv2d_transpose(K_in, Y_in, bint circular):
    cdef double[:, :, :, ::1] K = np.ascontiguousarray(K_in, dtype=np.float64)
    cdef double[:, :, ::1] Y = np.ascontiguousarray(Y_in, dtype=np.float64)
    cdef Py_ssize_t co = K.shape[0], ci = K.shape[1], kh = K.shape[2], kw = K.shape[3]
    cdef Py_ssize_t n = Y.shape[1], m = Y.shape[2]
    cdef Py_ssize_t hh = kh // 2, hw = kw // 2
    X_arr = np.zeros((ci, n, m))
    cdef double[:, :, ::1] X = X_arr
    cdef Py_ssize_t j, i, a, b
    with nogil:
        for i in range(ci):
            for j in range(co):
                for a in range(kh):
                    for b in range(kw):
                        if K[j, i, a, b] != 0.0:
                            _shift_acc(X[i], Y[j], K[j, i, a, b], hh - a, hw - b, circular)
    return X_arr
