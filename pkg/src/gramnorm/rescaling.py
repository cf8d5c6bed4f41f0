"""Spectral rescaling and the 1-Lipschitz layers built on it.

For a weight ``W`` and ``t >= 1`` Gram passes, the diagonal rescaling

    R_ii = (sum_j |G|_ij q_j / q_i) ** (-2**-t),   G = (W^T W)^(2^(t-1))

satisfies ``sigma_1(W R) <= 1``. ``t = 1`` is the AOL rescaling; as ``t``
grows ``sigma_1(W R) -> 1`` and the rescaling approaches spectral
normalization. The Gram iterate is carried in log scale and unscaled inside
the exponent, so large ``t`` never overflows.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .gram import _check_iter, _rescaled_iterates
from .numerics import as_kernel, as_matrix, fro_norm
from .oracle import sigma1_sandwich
from .toeplitz import gram_kernel_iterate

ACTIVATIONS = {
    "relu": lambda z: np.maximum(z, 0.0),
    "tanh": np.tanh,
    "sigmoid": lambda z: 0.5 * (1.0 + np.tanh(0.5 * z)),
}


@dataclass(frozen=True)
class RescaleDiag:
    factors: np.ndarray
    t: int
    q_weights: np.ndarray

    @property
    def size(self):
        return self.factors.shape[0]


def _rescale_from_sums(s, r, t):
    """``(exp(r) * s) ** (-2^-t)`` entrywise, with 0 for zero sums."""
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-(2.0 ** (-t)) * (np.log(s[pos]) + r))
    return out


def spectral_rescale(W, t, q_weights=None):
    W = as_matrix(W)
    if np.iscomplexobj(W):
        raise InvalidArgument("spectral rescaling expects a real weight")
    t = _check_iter(t, "t")
    q = W.shape[1]
    if q_weights is None:
        qw = np.ones(q)
    else:
        qw = np.asarray(q_weights, dtype=np.float64)
        if qw.shape != (q,) or not np.all(np.isfinite(qw)) or np.any(qw <= 0):
            raise InvalidArgument(f"q_weights must be {q} strictly positive finite numbers")
    G, r = None, 0.0
    for _, G, r in _rescaled_iterates(W, t):
        pass
    if G is None:
        return RescaleDiag(np.zeros(q), t, qw)
    sums = (np.abs(G) @ qw) / qw
    return RescaleDiag(_rescale_from_sums(sums, r, t), t, qw)


def conv_spectral_rescale(K, t):
    """Per-input-channel rescaling from ``t`` kernel Gram steps.

    Returns a :class:`RescaleDiag` over the ``c_in`` channels; the rescaled
    kernel is ``K * R[None, :, None, None]``.
    """
    K = as_kernel(K)
    t = _check_iter(t, "t")
    ci = K.shape[1]
    G, r = gram_kernel_iterate(K, t)
    if G is None:
        return RescaleDiag(np.zeros(ci), t, np.ones(ci))
    sums = np.sum(np.abs(G), axis=(0, 2, 3))
    return RescaleDiag(_rescale_from_sums(sums, r, t), t, np.ones(ci))


def rescale_kernel(K, diag):
    K = as_kernel(K)
    return K * diag.factors[None, :, None, None]


@dataclass
class LipschitzLayer:
    """Dense (``x -> W R x + b``) or residual (``x -> x - 2 W R^2 act(W^T x + b)``) layer."""

    weight: np.ndarray
    rescale: RescaleDiag
    bias: np.ndarray = field(default=None)
    kind: str = "dense"

    def __post_init__(self):
        self.weight = as_matrix(self.weight, "weight")
        p, q = self.weight.shape
        if self.rescale.size != q:
            raise InvalidArgument(f"rescale has size {self.rescale.size}, weight has {q} columns")
        if self.kind not in ("dense", "residual"):
            raise InvalidArgument(f"kind must be 'dense' or 'residual', got {self.kind!r}")
        blen = p if self.kind == "dense" else q
        if self.bias is None:
            self.bias = np.zeros(blen)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.bias.shape != (blen,):
            raise InvalidArgument(f"bias must have length {blen} for a {self.kind} layer")

    @classmethod
    def build(cls, W, t, kind="dense", bias=None, q_weights=None):
        return cls(W, spectral_rescale(W, t, q_weights), bias, kind)


def _check_input(x, n):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != n:
        raise InvalidArgument(f"input has length {x.shape[-1]}, expected {n}")
    return x


def dense_forward(layer, x):
    if layer.kind != "dense":
        raise InvalidArgument("dense_forward needs a dense layer")
    x = _check_input(x, layer.weight.shape[1])
    return (x * layer.rescale.factors) @ layer.weight.T + layer.bias


def residual_forward(layer, x, activation="relu"):
    if layer.kind != "residual":
        raise InvalidArgument("residual_forward needs a residual layer")
    if activation not in ACTIVATIONS:
        raise InvalidArgument(f"unknown activation {activation!r}; expected one of {sorted(ACTIVATIONS)}")
    W = layer.weight
    x = _check_input(x, W.shape[0])
    z = ACTIVATIONS[activation](x @ W + layer.bias)
    return x - 2.0 * (z * layer.rescale.factors**2) @ W.T


def stable_rank(W, tol=1e-10):
    """``||W||_F^2 / sigma_1(W)^2`` with sigma_1 from the sandwich certificate."""
    W = as_matrix(W)
    fro = fro_norm(W)
    if fro == 0.0:
        raise InvalidArgument("stable rank is undefined for the zero matrix")
    # scale-invariant; normalizing keeps huge Gram iterates in range
    Wn = W / fro
    cert = sigma1_sandwich(Wn, tol=tol)
    return 1.0 / cert.lower**2
