"""Spectral rotation and convolution on S^2 and SO(3).

The convolution ``[phi * f](R) = <L_R phi, f> = int conj(phi(R^-1 x)) f(x) dx``
has the per-degree Fourier form ``f_l phi_l^H`` (outer product on S^2,
matrix product on SO(3)).  With orthonormal bases the integral picks up an
extra factor ``sqrt(8 pi^2 / (2l+1))`` per degree; ``normalization="integral"``
(the default) includes it so the synthesized output equals the integral,
``normalization="product"`` returns the bare products.
"""
from dataclasses import dataclass

import numpy as np

from .harmonics import wigner_D_all
from .needlet import NeedletCoefficients
from .signals import Spectrum, degree_index, random_spectrum

NORMALIZATIONS = ("integral", "product")


def rotate(spec, rotation):
    """Rotate a spectrum: every degree block is left-multiplied by ``D^l(R)``.

    Equivalent to resampling the signal as ``x -> f(R^-1 x)``.  Accepts a
    :class:`~ndlt.signals.Spectrum` or :class:`~ndlt.needlet.NeedletCoefficients`
    (every band rotated).  Arithmetic follows the dtype of the input.
    """
    if isinstance(spec, NeedletCoefficients):
        Ds = wigner_D_all(max(b.bandwidth for _, b in spec.bands()), rotation)
        return spec.map_bands(lambda band: _rotate_with(band, Ds))
    return _rotate_with(spec, wigner_D_all(spec.bandwidth, rotation))


def _rotate_with(spec, Ds):
    out = np.empty_like(spec.data)
    result = spec.with_data(out)
    for l in range(spec.bandwidth + 1):
        D = Ds[l].astype(spec.dtype)
        if spec.manifold == "s2":
            result.block(l)[...] = spec.block(l) @ D.T
        else:
            result.block(l)[...] = np.matmul(D, spec.block(l))
    return result


def _degree_factor(l, normalization, dtype):
    if normalization == "integral":
        return np.asarray(np.sqrt(8.0 * np.pi ** 2 / (2 * l + 1)), dtype=dtype)
    if normalization == "product":
        return np.asarray(1.0, dtype=dtype)
    raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


def _check_pair(f, phi, manifold):
    if f.manifold != manifold or phi.manifold != manifold:
        raise ValueError(f"expected two {manifold} spectra")
    if f.bandwidth != phi.bandwidth:
        raise ValueError(f"bandwidth mismatch: signal {f.bandwidth}, filter {phi.bandwidth}")
    if phi.channels not in (1, f.channels):
        raise ValueError("filter must have one channel or as many as the signal")


def s2_convolve(f, phi, normalization="integral"):
    """S^2 convolution; degree block ``l`` of the SO(3) output is ``f_l (x) conj(phi_l)``."""
    _check_pair(f, phi, "s2")
    L = f.bandwidth
    out = Spectrum.zeros("so3", L, f.channels, dtype=np.result_type(f.dtype, phi.dtype))
    for l in range(L + 1):
        fl, pl = f.block(l), phi.block(l)
        out.block(l)[...] = (fl[:, :, None] * np.conj(pl)[:, None, :]) * _degree_factor(l, normalization, out.data.real.dtype)
    return out


def so3_convolve(f, phi, normalization="integral"):
    """SO(3) convolution; degree block ``l`` of the output is ``f_l phi_l^H``."""
    _check_pair(f, phi, "so3")
    L = f.bandwidth
    out = Spectrum.zeros("so3", L, f.channels, dtype=np.result_type(f.dtype, phi.dtype))
    for l in range(L + 1):
        prod = np.matmul(f.block(l), np.conj(np.swapaxes(phi.block(l), -1, -2)))
        out.block(l)[...] = prod * _degree_factor(l, normalization, out.data.real.dtype)
    return out


def convolve(f, phi, normalization="integral"):
    """Dispatch to :func:`s2_convolve` or :func:`so3_convolve` by manifold."""
    if f.manifold == "s2":
        return s2_convolve(f, phi, normalization)
    return so3_convolve(f, phi, normalization)


@dataclass(frozen=True)
class FilterTriple:
    """Filters for the low-pass and the two high-pass needlet bands.

    Each filter is either a 1-D complex array with one scalar per degree
    ("zonal" mode, applied by multiplication) or a :class:`Spectrum` ("block"
    mode, applied by :func:`convolve`).
    """

    lowpass: object
    hp1: object
    hp2: object
    normalization: str = "integral"

    @property
    def mode(self):
        kinds = {isinstance(f, Spectrum) for f in (self.lowpass, self.hp1, self.hp2)}
        if len(kinds) != 1:
            raise ValueError("filters of a triple must all be zonal or all be spectra")
        return "block" if kinds.pop() else "zonal"

    @classmethod
    def identity(cls, L):
        ones = np.ones(L + 1, dtype=complex)
        return cls(ones, ones, ones)

    @classmethod
    def zeros(cls, L):
        z = np.zeros(L + 1, dtype=complex)
        return cls(z, z, z)

    @classmethod
    def random(cls, manifold, L, decay=1.0, rng=None, real=False, dtype=np.complex128):
        """Block-mode triple of random spectra with amplitude ``(1+l)^-decay``."""
        rng = np.random.default_rng(rng)
        return cls(*(random_spectrum(manifold, L, 1, decay, rng, real=real, dtype=dtype) for _ in range(3)))


def _apply_filter(band, filt, mode, normalization):
    L = band.bandwidth
    if mode == "zonal":
        h = np.asarray(filt)
        if h.ndim != 1 or h.shape[0] < L + 1:
            raise ValueError(f"zonal filter needs {L + 1} degrees, got shape {h.shape}")
        return band.with_data(band.data * h[:L + 1][degree_index(band.manifold, L)].astype(band.dtype))
    if filt.bandwidth < L:
        raise ValueError(f"filter bandwidth {filt.bandwidth} below band bandwidth {L}")
    return convolve(band, filt.truncate(L).astype(band.dtype), normalization)


def needlet_block_convolve(coeffs, triple):
    """Convolve the low-pass band with ``triple.lowpass`` and the high-pass bands
    with ``triple.hp1`` / ``triple.hp2``.

    Zonal filters keep the manifold; block filters map S^2 bands to SO(3).
    """
    mode = triple.mode
    low = _apply_filter(coeffs.lowpass, triple.lowpass, mode, triple.normalization)
    high = {}
    for (n, j), band in coeffs.highpass.items():
        filt = triple.hp1 if n == 1 else triple.hp2
        high[(n, j)] = _apply_filter(band, filt, mode, triple.normalization)
    return NeedletCoefficients(low.manifold, coeffs.coarse_scale, coeffs.fine_scale,
                               coeffs.bandwidth, low, high)
