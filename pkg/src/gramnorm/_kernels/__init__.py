"""Hot inner loops with a compiled (Cython) core and a numpy fallback.

The compiled module is used when it imports; otherwise the pure-Python
implementation is selected. :func:`use_backend` switches explicitly, which the
benchmark and the backend-agreement tests rely on.
"""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_impl = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return ["cython", "python"] if _ckernels is not None else ["python"]


def backend():
    """Name of the active backend."""
    return "cython" if _impl is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Select ``"cython"`` or ``"python"``; returns the previous backend name."""
    global _impl
    previous = backend()
    if name == "python":
        _impl = _pykernels
    elif name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; reinstall the package")
        _impl = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def gram_correlate(A):
    return _impl.gram_correlate(A)


def block_gram_logs(D, n_iter, norm_code=0):
    return _impl.block_gram_logs(D, int(n_iter), int(norm_code))


def conv2d(K, X, circular=False):
    return _impl.conv2d(K, X, bool(circular))


def conv2d_transpose(K, Y, circular=False):
    return _impl.conv2d_transpose(K, Y, bool(circular))
