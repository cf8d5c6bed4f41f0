"""Exception types shared across the package.

The CLI maps each class to a stable exit code, see :mod:`gramnorm.cli`.
"""


class GramNormError(Exception):
    """Base class for all errors raised by gramnorm."""


class InvalidArgument(GramNormError, ValueError):
    """Malformed input: wrong shape, NaN/Inf entries, bad sizes."""


class PreconditionError(GramNormError, ValueError):
    """A mathematical precondition does not hold (e.g. sampling size too small)."""


class MemoryCapError(GramNormError, MemoryError):
    """Materializing an operator would exceed the configured element cap."""

    def __init__(self, requested, cap):
        self.requested = requested
        self.cap = cap
        super().__init__(
            f"dense operator needs {requested} elements, above the cap of {cap}"
        )


class NotConvergedError(GramNormError, RuntimeError):
    """An iterative certificate did not reach its tolerance.

    The partially converged certificate is kept on ``certificate`` so callers
    can still use the (valid but loose) interval.
    """

    def __init__(self, message, certificate):
        self.certificate = certificate
        super().__init__(message)
