"""Non-linear and resolution operators: wavelet shrinkage, spectral pooling, spatial ReLU."""
from dataclasses import dataclass
import math

import numpy as np

from ._validation import check_int
from .exceptions import PreconditionError
from .harmonics import analysis, synthesis
from .needlet import NeedletCoefficients
from .quadrature import make_rule
from .signals import GridSignal

_IMAG_LEAK_TOL = 1e-12


@dataclass(frozen=True)
class ShrinkageConfig:
    """Soft-threshold parameters.

    Parameters
    ----------
    sigma : float
        Noise-level analogue, ``sigma >= 0``.
    n : int, optional
        Coefficient count the threshold normalizes over.  ``None`` means the
        total number of high-pass coefficients being thresholded.
    """

    sigma: float
    n: int = None

    def __post_init__(self):
        sigma = float(self.sigma)
        if not sigma >= 0.0 or not math.isfinite(sigma):
            raise ValueError(f"sigma must be a finite non-negative number, got {self.sigma!r}")
        object.__setattr__(self, "sigma", sigma)
        if self.n is not None:
            object.__setattr__(self, "n", check_int(self.n, "n", minimum=1))

    def threshold(self, n=None):
        """``lambda = sigma * sqrt(2 log N) / sqrt(N)``."""
        N = self.n if self.n is not None else n
        if N is None:
            raise ValueError("coefficient count unknown; pass n or set ShrinkageConfig.n")
        N = check_int(N, "N", minimum=1)
        return self.sigma * math.sqrt(2.0 * math.log(N)) / math.sqrt(N)


def soft_threshold(x, lam):
    """Complex soft threshold ``x/|x| * (|x| - lam)_+``; phase preserving."""
    x = np.asarray(x)
    if lam == 0:
        return x.copy()
    mag = np.abs(x)
    rdtype = mag.dtype
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mag > lam, 1.0 - rdtype.type(lam) / mag, 0.0).astype(rdtype)
    return x * scale


def highpass_count(coeffs):
    """Number of high-pass coefficients across all bands and channels."""
    return sum(band.data.size for band in coeffs.highpass_bands())


def shrink(coeffs, config):
    """Soft-threshold every high-pass coefficient; the low-pass band is returned untouched.

    Parameters
    ----------
    coeffs : NeedletCoefficients
    config : ShrinkageConfig or float
        A bare number is taken as ``sigma``.

    Returns
    -------
    NeedletCoefficients
    """
    if not isinstance(coeffs, NeedletCoefficients):
        raise TypeError("shrink expects NeedletCoefficients")
    if not isinstance(config, ShrinkageConfig):
        config = ShrinkageConfig(config)
    lam = config.threshold(max(highpass_count(coeffs), 1))
    return coeffs.map_bands(lambda band: band.with_data(soft_threshold(band.data, lam)),
                            highpass_only=True)


def spectral_pool(spec):
    """Keep degrees ``0 .. floor(L/2)``.

    Works on a :class:`~ndlt.signals.Spectrum`; requires bandwidth >= 2.
    """
    L = spec.bandwidth
    if L < 2:
        raise ValueError(f"spectral pooling needs bandwidth >= 2, got {L}")
    return spec.truncate(L // 2)


def spatial_relu(spec, rule=None, check_real=False):
    """ReLU applied pointwise on the grid: synthesis, ``max(Re f, 0)``, analysis.

    Parameters
    ----------
    spec : Spectrum
    rule : QuadratureRule, optional
        Grid for the round trip; defaults to the manifold rule at the spectrum
        bandwidth.  Its bandwidth must equal the spectrum bandwidth.
    check_real : bool
        Raise :class:`PreconditionError` when the synthesized samples carry an
        imaginary part above ``1e-12`` relative to their largest magnitude.
    """
    if rule is None:
        rule = make_rule(spec.manifold, max(spec.bandwidth, 1))
    if rule.manifold != spec.manifold or rule.bandwidth != max(spec.bandwidth, 1):
        raise ValueError(
            f"rule ({rule.manifold}, L={rule.bandwidth}) does not match spectrum "
            f"({spec.manifold}, L={spec.bandwidth})")
    samples = synthesis(spec, rule).samples
    if check_real:
        scale = max(float(np.max(np.abs(samples))), 1e-300)
        leak = float(np.max(np.abs(samples.imag))) / scale
        if leak > _IMAG_LEAK_TOL:
            raise PreconditionError(f"signal is not real-valued (relative imaginary part {leak:.2e})")
    rect = np.maximum(samples.real, 0).astype(samples.dtype)
    return analysis(GridSignal(rule, rect), spec.bandwidth)
