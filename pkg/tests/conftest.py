"""Shared fixtures and independent reference implementations.

The ``naive_*`` helpers are deliberately written as plain loops so they share
no code path with the library they check.
"""

import cmath

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def naive_block(K, n, u, v):
    co, ci, kh, kw = K.shape
    out = np.zeros((co, ci), dtype=complex)
    for k1 in range(kh):
        for k2 in range(kw):
            ph = cmath.exp(-2j * cmath.pi * k1 * u / n) * cmath.exp(-2j * cmath.pi * k2 * v / n)
            out += ph * K[:, :, k1, k2]
    return out


def naive_conv(K, X, circular):
    """Same-size multichannel cross-correlation by explicit loops."""
    co, ci, kh, kw = K.shape
    _, n, m = X.shape
    Y = np.zeros((co, n, m))
    for j in range(co):
        for x in range(n):
            for y in range(m):
                s = 0.0
                for i in range(ci):
                    for a in range(kh):
                        for b in range(kw):
                            xs, ys = x + a - kh // 2, y + b - kw // 2
                            if circular:
                                xs, ys = xs % n, ys % m
                            elif not (0 <= xs < n and 0 <= ys < m):
                                continue
                            s += K[j, i, a, b] * X[i, xs, ys]
                Y[j, x, y] = s
    return Y


def svd_sigma1(M):
    return float(np.linalg.svd(M, compute_uv=False)[0])


def averaging_kernel():
    return np.full((1, 1, 3, 3), 1.0 / 9.0)


def delta_kernel(k=3):
    K = np.zeros((1, 1, k, k))
    K[0, 0, 0, 0] = 1.0
    return K
