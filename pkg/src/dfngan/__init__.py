"""Departure-from-normality tools for conditioning GAN training.

The package splits into a dense linear algebra core (:mod:`dfngan.linalg`),
the DFN measures built on it (:mod:`dfngan.dfn`), weight regularizers
(:mod:`dfngan.regularizers`), an audio spectrogram pipeline
(:mod:`dfngan.signal`) and a small GAN harness (:mod:`dfngan.gan_toy`).
"""

from .dfn import (
    DfnMethod,
    DfnReport,
    GoeConfig,
    difference_dfn,
    dfn_exact,
    dfn_fast,
    interpolation_error_bound,
)
from .exceptions import DfnganError
from .linalg import SchurForm, downsample2, hessenberg_reduce, real_schur, top_singular_triplet
from .matrix_io import load_matrix, save_matrix
from .regularizers import (
    STOP_GRAD_SECOND,
    GradientMode,
    PenaltyResult,
    dfn_penalty_gradient,
    orthogonal_penalty_v1,
    orthogonal_penalty_v2,
    spectral_clamp_update,
)

__version__ = "0.1.0"

__all__ = [
    "DfnganError",
    "SchurForm",
    "hessenberg_reduce",
    "real_schur",
    "top_singular_triplet",
    "downsample2",
    "DfnMethod",
    "DfnReport",
    "GoeConfig",
    "dfn_exact",
    "dfn_fast",
    "difference_dfn",
    "interpolation_error_bound",
    "STOP_GRAD_SECOND",
    "GradientMode",
    "PenaltyResult",
    "spectral_clamp_update",
    "orthogonal_penalty_v1",
    "orthogonal_penalty_v2",
    "dfn_penalty_gradient",
    "load_matrix",
    "save_matrix",
]
