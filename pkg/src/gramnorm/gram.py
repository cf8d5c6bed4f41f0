"""Gram iteration on dense matrices.

Repeated squaring ``W <- W^* W`` with Frobenius rescaling at every pass; the
norm of the final iterate, raised to ``2^-t`` and unscaled, is a certified
upper bound on the largest singular value and converges to it quadratically.
"""

import math
from dataclasses import asdict, dataclass

from .errors import InvalidArgument
from .numerics import NORMS, as_matrix, fro_norm, matrix_norm

METHODS = (
    "gram-dense",
    "circ",
    "toep-inf",
    "toep-fro",
    "circ-approx",
    "power-iter",
    "sandwich",
)


@dataclass(frozen=True)
class NormCertificate:
    """Estimate of a spectral norm.

    ``is_upper_bound`` is True only when the method carries a proven
    upper-bound guarantee (Gram-based methods with a consistent norm).
    """

    value: float
    iterations: int
    method: str
    is_upper_bound: bool
    norm_used: str = "frobenius"

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidArgument(f"unknown method tag {self.method!r}")
        if not (math.isfinite(self.value) and self.value >= 0):
            raise InvalidArgument(f"certificate value must be finite and >= 0, got {self.value}")

    def to_dict(self):
        return asdict(self)


def _check_norm(which):
    if which not in NORMS:
        raise InvalidArgument(f"unknown norm {which!r}; expected one of {NORMS}")


def _check_iter(n_iter, name="n_iter"):
    if int(n_iter) != n_iter or n_iter < 1:
        raise InvalidArgument(f"{name} must be an integer >= 1, got {n_iter}")
    return int(n_iter)


def gram_iterate_once(W):
    """One Gram pass: ``W^* W``."""
    W = as_matrix(W)
    return W.conj().T @ W


def _rescaled_iterates(W, t_max):
    """Yield ``(t, G_t, r_t)`` for t = 1..t_max, where the true iterate is exp(r_t) G_t.

    Stops early (yielding nothing further) on an exactly zero matrix.
    """
    r = 0.0
    G = W
    for t in range(1, t_max + 1):
        fro = fro_norm(G)
        if fro == 0.0:
            return
        r = 2.0 * (r + math.log(fro))
        G = G / fro
        G = G.conj().T @ G
        yield t, G, r


def _unscale(G, r, t, which):
    nrm = matrix_norm(G, which)
    if nrm == 0.0:
        return 0.0
    return math.exp(2.0 ** (-t) * (math.log(nrm) + r))


def gram_iteration(W, n_iter, which_norm="frobenius"):
    """Certified upper bound on sigma_1(W) after ``n_iter`` Gram passes.

    Examples
    --------
    >>> round(gram_iteration([[3.0, 0.0], [0.0, 1.0]], 1).value, 6)
    3.009217
    """
    W = as_matrix(W)
    n_iter = _check_iter(n_iter)
    _check_norm(which_norm)
    value = 0.0
    for t, G, r in _rescaled_iterates(W, n_iter):
        if t == n_iter:
            value = _unscale(G, r, t, which_norm)
    return NormCertificate(value, n_iter, "gram-dense", True, which_norm)


def gram_sequence(W, t_max, which_norm="frobenius"):
    """Certificates for ``n_iter = 1..t_max`` sharing the intermediate squarings."""
    W = as_matrix(W)
    t_max = _check_iter(t_max, "t_max")
    _check_norm(which_norm)
    values = [0.0] * t_max
    for t, G, r in _rescaled_iterates(W, t_max):
        values[t - 1] = _unscale(G, r, t, which_norm)
    return [
        NormCertificate(v, t, "gram-dense", True, which_norm)
        for t, v in enumerate(values, start=1)
    ]
