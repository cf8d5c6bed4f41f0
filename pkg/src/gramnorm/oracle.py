"""Ground truth for the estimators.

* dense materialization of the zero-padding (doubly-block Toeplitz) and
  circular (doubly-block circulant) convolution operators,
* two-sided certificates on sigma_1 (a Rayleigh-quotient lower bound and a
  Gram-iteration upper bound),
* the power-iteration baseline on the convolution itself,
* central finite differences for smoothness probes.

Vectorization convention everywhere: an input image ``X`` of shape
``(c_in, n, n)`` maps to ``X.ravel()`` (C order), so that
``T @ X.ravel() == conv2d(K, X).ravel()``.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from . import _kernels
from .errors import InvalidArgument, MemoryCapError
from .gram import NormCertificate
from .numerics import as_kernel, as_matrix

DEFAULT_ELEMENT_CAP = 200_000_000
DEFAULT_SEED = 20240417


@dataclass(frozen=True)
class SandwichCertificate:
    lower: float
    upper: float
    gap: float
    iterations_lower: int
    iterations_upper: int
    converged: bool = True

    def to_dict(self):
        return asdict(self)


# -- materialization ---------------------------------------------------------

def _check_cap(K, n, element_cap):
    co, ci = K.shape[:2]
    requested = co * ci * n**4
    cap = DEFAULT_ELEMENT_CAP if element_cap is None else int(element_cap)
    if requested > cap:
        raise MemoryCapError(requested, cap)


def _materialize(K, n, circular, element_cap):
    K = as_kernel(K)
    n = int(n)
    if n < 1:
        raise InvalidArgument(f"input size must be >= 1, got {n}")
    co, ci, kh, kw = K.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise InvalidArgument(
            f"materialization needs odd kernel sides for the centered layout, got {kh}x{kw}"
        )
    _check_cap(K, n, element_cap)
    n2 = n * n
    M = np.zeros((co * n2, ci * n2))
    xs, ys = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    jj = (np.arange(co) * n2)[:, None, None]
    ii = (np.arange(ci) * n2)[None, :, None]
    for a in range(kh):
        for b in range(kw):
            src_x = xs + a - kh // 2
            src_y = ys + b - kw // 2
            if circular:
                src_x, src_y, out = src_x % n, src_y % n, np.arange(n2)
            else:
                ok = (src_x >= 0) & (src_x < n) & (src_y >= 0) & (src_y < n)
                src_x, src_y, out = src_x[ok], src_y[ok], np.arange(n2)[ok]
            rows = jj + out[None, None, :]
            cols = ii + (src_x * n + src_y)[None, None, :]
            vals = np.broadcast_to(K[:, :, a, b][:, :, None], np.broadcast_shapes(rows.shape, cols.shape))
            # wrap-around can hit the same entry twice when n < k
            np.add.at(M, (np.broadcast_to(rows, vals.shape), np.broadcast_to(cols, vals.shape)), vals)
    return M


def materialize_toeplitz(K, n, element_cap=None):
    """Dense ``(c_out n^2) x (c_in n^2)`` matrix of the zero-padding "same" convolution."""
    return _materialize(K, n, False, element_cap)


def materialize_circulant(K, n, element_cap=None):
    """Dense matrix of the circular-padding convolution (wrap-around at the borders)."""
    return _materialize(K, n, True, element_cap)


# -- sandwich certificates ---------------------------------------------------

def _start_vectors(q, seed, complex_):
    rng = np.random.default_rng(seed)
    vecs = rng.standard_normal((2, q))
    if complex_:
        vecs = vecs + 1j * rng.standard_normal((2, q))
    return vecs


def block_sandwich(blocks, tol=1e-10, max_iter=64, seed=DEFAULT_SEED, criterion="max"):
    """Two-sided bounds on sigma_1 for a batch of matrices ``(B, p, q)``.

    Upper side: Gram iteration with Frobenius rescaling. Lower side: power
    iteration driven by the same squarings (the rescaled iterate applied to
    a seeded start vector, plus a restart seed and the iterate's dominant
    column), scored with the exact ratio ``||A v|| / ||v||``.

    ``criterion="max"`` stops once the maximum over the batch is certified to
    ``tol``; ``"each"`` waits for every block. Returns ``(lower, upper, t)``.
    """
    A = np.asarray(blocks)
    if A.ndim != 3:
        raise InvalidArgument(f"expected a (B, p, q) batch, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument("blocks contain NaN or Inf entries")
    if A.shape[2] > A.shape[1]:
        A = np.conj(np.swapaxes(A, 1, 2))
    A = A.astype(np.complex128 if np.iscomplexobj(A) else np.float64)
    scale = np.max(np.abs(A), axis=(1, 2))
    scale = np.where(scale > 0, scale, 1.0)
    A = A / scale[:, None, None]
    B, _, q = A.shape
    starts = _start_vectors(q, seed, np.iscomplexobj(A))

    lower = np.zeros(B)
    upper = np.zeros(B)
    fro0 = np.linalg.norm(A, axis=(1, 2))
    alive = fro0 > 0
    r = np.zeros(B)
    G = A.copy()
    t = 0
    for t in range(1, int(max_iter) + 1):
        fro = np.linalg.norm(G, axis=(1, 2))
        alive &= fro > 0
        safe = np.where(alive, fro, 1.0)
        r = 2.0 * (r + np.log(safe))
        G = G / safe[:, None, None]
        G = np.matmul(np.conj(np.swapaxes(G, 1, 2)), G)
        gfro = np.linalg.norm(G, axis=(1, 2))
        with np.errstate(divide="ignore"):
            up = np.exp(2.0 ** (-t) * (np.log(gfro) + r))
        upper = np.where(alive, up, 0.0)

        cols = np.argmax(np.linalg.norm(G, axis=1), axis=1)
        cands = [G @ s for s in starts]
        cands.append(np.take_along_axis(G, cols[:, None, None], axis=2)[:, :, 0])
        for v in cands:
            vn = np.linalg.norm(v, axis=1)
            ok = vn > 0
            Av = np.linalg.norm(np.matmul(A, v[:, :, None])[:, :, 0], axis=1)
            lower = np.maximum(lower, np.where(ok, Av / np.where(ok, vn, 1.0), 0.0))
        lower = np.minimum(lower, upper)

        if criterion == "max":
            top = (upper * scale).max()
            if top == 0.0 or (top - (lower * scale).max()) / top <= tol:
                break
        else:
            with np.errstate(invalid="ignore", divide="ignore"):
                gaps = np.where(upper > 0, (upper - lower) / upper, 0.0)
            if np.all(gaps <= tol):
                break
    return lower * scale, upper * scale, t


def sigma1_sandwich(M, tol=1e-10, max_iter=200, seed=DEFAULT_SEED):
    """Certified interval ``[lower, upper]`` around sigma_1 of a dense matrix."""
    if not tol > 0:
        raise InvalidArgument(f"tol must be > 0, got {tol}")
    M = as_matrix(M)
    lower, upper, t = block_sandwich(M[None], tol=tol, max_iter=max_iter, seed=seed)
    lo, up = float(lower[0]), float(upper[0])
    gap = 0.0 if up == 0.0 else (up - lo) / up
    return SandwichCertificate(lo, up, gap, t, t, converged=gap <= tol)


def sigma1_lanczos_lower(op, seed=DEFAULT_SEED, tol=1e-13):
    """Lower bound on sigma_1 of a (possibly matrix-free) operator.

    Runs Lanczos (ARPACK) on ``op^T op`` and scores the returned Ritz vector
    with ``||op v|| / ||v||``, which never exceeds sigma_1 up to rounding.
    ``op`` is a dense array or a :class:`scipy.sparse.linalg.LinearOperator`.
    """
    if isinstance(op, np.ndarray):
        op = as_matrix(op)
        dense = op
        op = LinearOperator(dense.shape, matvec=lambda x: dense @ x,
                            rmatvec=lambda y: dense.T @ y, dtype=np.float64)
    q = op.shape[1]
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(q)
    if q <= 3:
        # ARPACK needs k < dimension; go dense on tiny operators
        dense = op.matmat(np.eye(q))
        _, s, vt = np.linalg.svd(dense)
        v = vt[0]
    else:
        gram = LinearOperator((q, q), matvec=lambda x: op.rmatvec(op.matvec(x)), dtype=np.float64)
        _, vecs = eigsh(gram, k=1, which="LA", v0=v0, tol=tol, maxiter=10 * q + 1000)
        v = vecs[:, 0]
    vn = np.linalg.norm(v)
    if vn == 0:
        return 0.0
    return float(np.linalg.norm(op.matvec(v)) / vn)


def conv_operator(K, n, padding="zero"):
    """Matrix-free :class:`LinearOperator` for the convolution at size ``n``."""
    K = as_kernel(K)
    circular = _padding_flag(padding)
    co, ci = K.shape[:2]

    def mv(x):
        return _kernels.conv2d(K, np.reshape(x, (ci, n, n)), circular).ravel()

    def rmv(y):
        return _kernels.conv2d_transpose(K, np.reshape(y, (co, n, n)), circular).ravel()

    return LinearOperator((co * n * n, ci * n * n), matvec=mv, rmatvec=rmv, dtype=np.float64)


def _padding_flag(padding):
    if padding not in ("zero", "circular"):
        raise InvalidArgument(f"padding must be 'zero' or 'circular', got {padding!r}")
    return padding == "circular"


# -- baselines and probes ----------------------------------------------------

def conv_power_iteration(K, n, padding="zero", iters=100, seed=DEFAULT_SEED):
    """Power iteration on ``conv^T conv`` from a seeded random image.

    This is the usual lower-side estimate; ``is_upper_bound`` is False.
    """
    K = as_kernel(K)
    circular = _padding_flag(padding)
    if int(iters) < 1:
        raise InvalidArgument(f"iters must be >= 1, got {iters}")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((K.shape[1], n, n))
    x /= np.linalg.norm(x)
    for _ in range(int(iters)):
        x = _kernels.conv2d_transpose(K, _kernels.conv2d(K, x, circular), circular)
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            return NormCertificate(0.0, int(iters), "power-iter", False, "frobenius")
        x /= nrm
    value = float(np.linalg.norm(_kernels.conv2d(K, x, circular)))
    return NormCertificate(value, int(iters), "power-iter", False, "frobenius")


@dataclass(frozen=True)
class FiniteDiffResult:
    grad: np.ndarray
    max_abs: float
    nan_count: int


def finite_diff_grad(f, K, eps=1e-6):
    """Central differences of a scalar function of a kernel, entry by entry."""
    if not eps > 0:
        raise InvalidArgument(f"eps must be > 0, got {eps}")
    K = as_kernel(K)
    grad = np.empty_like(K)
    flat = grad.reshape(-1)
    base = K.reshape(-1)
    for idx in range(base.size):
        plus = base.copy()
        minus = base.copy()
        plus[idx] += eps
        minus[idx] -= eps
        flat[idx] = (float(f(plus.reshape(K.shape))) - float(f(minus.reshape(K.shape)))) / (2 * eps)
    nan_count = int(np.count_nonzero(~np.isfinite(grad)))
    max_abs = float(np.nanmax(np.abs(grad))) if nan_count < grad.size else math.nan
    return FiniteDiffResult(grad, max_abs, nan_count)
