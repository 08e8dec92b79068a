"""scikit-learn style wrappers.

Rows of ``X`` are channels: a grid-sample matrix has shape
``(n_signals, n_points)``, a spectral matrix ``(n_signals, n_coefficients)``.
Inputs are complex, so validation is done here rather than with
``sklearn.utils.check_array`` (which rejects complex data).
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_int, check_manifold
from .harmonics import analysis, synthesis
from .layers import ShrinkageConfig, shrink, spectral_pool
from .needlet import NeedletCoefficients, decompose, fine_scale, highpass_bandwidth, lowpass_bandwidth, reconstruct
from .quadrature import make_rule
from .signals import GridSignal, Spectrum, spectral_size

_DTYPES = {"double": np.complex128, "single": np.complex64}


def _as_matrix(X, n_features, what):
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of {what}, got shape {X.shape}")
    if X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} {what} per row, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or infinity")
    return X


class SphericalFourierTransform(TransformerMixin, BaseEstimator):
    """Grid samples to generalized Fourier coefficients and back.

    Parameters
    ----------
    manifold : {"s2", "so3"}
    bandwidth : int
    precision : {"double", "single"}

    Attributes
    ----------
    rule_ : QuadratureRule
    n_features_in_ : int
    """

    def __init__(self, manifold="s2", bandwidth=8, precision="double"):
        self.manifold = manifold
        self.bandwidth = bandwidth
        self.precision = precision

    def fit(self, X=None, y=None):
        manifold = check_manifold(self.manifold)
        L = check_int(self.bandwidth, "bandwidth", minimum=1)
        self.rule_ = make_rule(manifold, L)
        self.n_features_in_ = self.rule_.n_points
        if X is not None:
            _as_matrix(X, self.n_features_in_, "samples")
        return self

    def transform(self, X):
        check_is_fitted(self, "rule_")
        X = _as_matrix(X, self.n_features_in_, "samples").astype(_DTYPES[self.precision])
        return analysis(GridSignal(self.rule_, X)).data

    def inverse_transform(self, X):
        check_is_fitted(self, "rule_")
        n = spectral_size(self.rule_.manifold, self.rule_.bandwidth)
        X = _as_matrix(X, n, "coefficients").astype(_DTYPES[self.precision])
        return synthesis(Spectrum(self.rule_.manifold, self.rule_.bandwidth, X), self.rule_).samples


class NeedletTransform(TransformerMixin, BaseEstimator):
    """Spectral coefficients to concatenated needlet bands and back.

    Parameters
    ----------
    manifold : {"s2", "so3"}
    bandwidth : int
    coarse_scale : int, optional
        ``J0``; defaults to ``J - 1``.

    Attributes
    ----------
    fine_scale_ : int
    coarse_scale_ : int
    band_slices_ : dict
        Column slice of every band in the transformed matrix.
    """

    def __init__(self, manifold="s2", bandwidth=8, coarse_scale=None):
        self.manifold = manifold
        self.bandwidth = bandwidth
        self.coarse_scale = coarse_scale

    def fit(self, X=None, y=None):
        manifold = check_manifold(self.manifold)
        L = check_int(self.bandwidth, "bandwidth", minimum=1)
        self.fine_scale_ = fine_scale(L)
        if self.fine_scale_ < 2:
            raise ValueError("bandwidth too small for a needlet decomposition")
        J0 = self.fine_scale_ - 1 if self.coarse_scale is None else check_int(self.coarse_scale, "coarse_scale", 1)
        if J0 >= self.fine_scale_:
            raise ValueError(f"coarse_scale must be below J={self.fine_scale_}")
        self.coarse_scale_ = J0
        self.n_features_in_ = spectral_size(manifold, L)
        slices, pos = {}, 0
        keys = [("lowpass", J0, lowpass_bandwidth(J0))]
        for j in range(J0, self.fine_scale_):
            keys += [("hp1", j, highpass_bandwidth(j)), ("hp2", j, highpass_bandwidth(j))]
        for kind, j, bw in keys:
            n = spectral_size(manifold, bw)
            slices[(kind, j)] = slice(pos, pos + n)
            pos += n
        self.band_slices_ = slices
        if X is not None:
            _as_matrix(X, self.n_features_in_, "coefficients")
        return self

    def decompose(self, X):
        """Needlet coefficients of the rows of ``X``."""
        check_is_fitted(self, "band_slices_")
        X = _as_matrix(X, self.n_features_in_, "coefficients")
        return decompose(Spectrum(self.manifold, self.bandwidth, X), self.coarse_scale_, self.fine_scale_)

    def transform(self, X):
        return np.concatenate([band.data for _, band in self.decompose(X).bands()], axis=1)

    def _coefficients(self, Z):
        n = max(s.stop for s in self.band_slices_.values())
        Z = _as_matrix(Z, n, "band coefficients")
        manifold = check_manifold(self.manifold)
        low = None
        high = {}
        for (kind, j), sl in self.band_slices_.items():
            bw = lowpass_bandwidth(j) if kind == "lowpass" else highpass_bandwidth(j)
            band = Spectrum(manifold, bw, Z[:, sl])
            if kind == "lowpass":
                low = band
            else:
                high[(1 if kind == "hp1" else 2, j)] = band
        return NeedletCoefficients(manifold, self.coarse_scale_, self.fine_scale_, self.bandwidth, low, high)

    def inverse_transform(self, Z):
        check_is_fitted(self, "band_slices_")
        return reconstruct(self._coefficients(Z)).data


class WaveletShrinkage(TransformerMixin, BaseEstimator):
    """Needlet-domain soft-threshold denoiser on spectral coefficients.

    ``transform`` decomposes, shrinks the high-pass bands and reconstructs.

    Parameters
    ----------
    sigma : float
    manifold : {"s2", "so3"}
    bandwidth : int
    coarse_scale : int, optional
    n : int, optional
        Coefficient count in the threshold; defaults to the high-pass count.
    """

    def __init__(self, sigma=1e-3, manifold="s2", bandwidth=8, coarse_scale=None, n=None):
        self.sigma = sigma
        self.manifold = manifold
        self.bandwidth = bandwidth
        self.coarse_scale = coarse_scale
        self.n = n

    def fit(self, X=None, y=None):
        self.config_ = ShrinkageConfig(self.sigma, self.n)
        self.needlet_ = NeedletTransform(self.manifold, self.bandwidth, self.coarse_scale).fit(X)
        self.n_features_in_ = self.needlet_.n_features_in_
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        return reconstruct(shrink(self.needlet_.decompose(X), self.config_)).data


class SpectralPooling(TransformerMixin, BaseEstimator):
    """Keep degrees up to ``floor(L/2)`` of spectral coefficient rows."""

    def __init__(self, manifold="s2", bandwidth=8):
        self.manifold = manifold
        self.bandwidth = bandwidth

    def fit(self, X=None, y=None):
        manifold = check_manifold(self.manifold)
        L = check_int(self.bandwidth, "bandwidth", minimum=2)
        self.n_features_in_ = spectral_size(manifold, L)
        self.output_bandwidth_ = L // 2
        if X is not None:
            _as_matrix(X, self.n_features_in_, "coefficients")
        return self

    def transform(self, X):
        check_is_fitted(self, "output_bandwidth_")
        X = _as_matrix(X, self.n_features_in_, "coefficients")
        return spectral_pool(Spectrum(self.manifold, self.bandwidth, X)).data
