"""Certified spectral-norm estimates for convolutional layers via Gram iteration."""

from ._kernels import backend, use_backend
from .bounds import (
    FactorParams,
    bound_lower_input,
    bound_toeplitz_via_circ,
    correction_factor,
    figure1_curve,
    spectral_density,
)
from .circulant import exact_sigma_circ, norm2_circ
from .errors import (
    GramNormError,
    InvalidArgument,
    MemoryCapError,
    NotConvergedError,
    PreconditionError,
)
from .gram import NormCertificate, gram_iterate_once, gram_iteration, gram_sequence
from .numerics import dft_matrix, fft2_kernel, matrix_norm
from .oracle import (
    SandwichCertificate,
    conv_power_iteration,
    finite_diff_grad,
    materialize_circulant,
    materialize_toeplitz,
    sigma1_sandwich,
)
from .rescaling import (
    LipschitzLayer,
    RescaleDiag,
    conv_spectral_rescale,
    dense_forward,
    residual_forward,
    spectral_rescale,
    stable_rank,
)
from .toeplitz import kernel_gram_step, norm2_toep

__version__ = "0.1.0"
