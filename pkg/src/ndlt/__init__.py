"""Needlet transforms on S^2 and SO(3): quadrature, harmonic transforms, filter
banks, multi-level needlet decomposition, equivariant convolution, wavelet
shrinkage and an equivariance test harness."""

__version__ = "0.1.0"

from .convolution import FilterTriple, convolve, needlet_block_convolve, rotate, s2_convolve, so3_convolve
from .estimators import NeedletTransform, SpectralPooling, SphericalFourierTransform, WaveletShrinkage
from .exceptions import (ContainerCorruptError, ContainerParseError, ConvergenceError,
                         DegenerateGeometryError, InvalidPipelineError, NdltError, PreconditionError)
from .harmonics import Rotation, analysis, evaluate, synthesis, wigner_d, wigner_D
from .harness import EquivarianceReport, ablation_table, decay_curve, equivariance_error, sigma_sweep
from .io import read_container, write_container
from .layers import ShrinkageConfig, shrink, spatial_relu, spectral_pool
from .needlet import NeedletCoefficients, decompose, reconstruct, spatial_coeffs, verify_tightness
from .quadrature import QuadratureRule, make_rule, s2_rule, so3_rule
from .signals import GridSignal, Spectrum, random_spectrum

__all__ = [
    "FilterTriple", "convolve", "needlet_block_convolve", "rotate", "s2_convolve", "so3_convolve",
    "NeedletTransform", "SpectralPooling", "SphericalFourierTransform", "WaveletShrinkage",
    "ContainerCorruptError", "ContainerParseError", "ConvergenceError", "DegenerateGeometryError",
    "InvalidPipelineError", "NdltError", "PreconditionError",
    "Rotation", "analysis", "evaluate", "synthesis", "wigner_d", "wigner_D",
    "EquivarianceReport", "ablation_table", "decay_curve", "equivariance_error", "sigma_sweep",
    "read_container", "write_container",
    "ShrinkageConfig", "shrink", "spatial_relu", "spectral_pool",
    "NeedletCoefficients", "decompose", "reconstruct", "spatial_coeffs", "verify_tightness",
    "QuadratureRule", "make_rule", "s2_rule", "so3_rule",
    "GridSignal", "Spectrum", "random_spectrum",
]
