"""Value types: spectra on S^2 / SO(3) and sampled grid signals.

Spectral coefficients are stored flat, one row per channel:

* S^2: degree-major, ``m = -l..l`` -> index ``l*l + l + m``; ``(L+1)^2`` per channel.
* SO(3): degree-major, each ``(2l+1, 2l+1)`` block row-major (``m`` rows,
  ``n`` columns); ``sum_l (2l+1)^2`` per channel.
"""
from dataclasses import dataclass

import numpy as np

from ._validation import check_complex_2d, check_int, check_manifold
from .quadrature import QuadratureRule


def s2_size(L):
    return (L + 1) ** 2


def so3_size(L):
    return (L + 1) * (2 * L + 1) * (2 * L + 3) // 3


def spectral_size(manifold, L):
    return s2_size(L) if manifold == "s2" else so3_size(L)


def block_offset(manifold, l):
    """Flat offset of the first coefficient of degree ``l``."""
    return s2_size(l - 1) if manifold == "s2" else (so3_size(l - 1) if l > 0 else 0)


def degree_index(manifold, L):
    """Degree ``l`` of every flat coefficient up to bandwidth ``L``."""
    ls = np.arange(L + 1)
    counts = 2 * ls + 1 if manifold == "s2" else (2 * ls + 1) ** 2
    return np.repeat(ls, counts)


@dataclass(frozen=True)
class Spectrum:
    """Generalized Fourier coefficients of a multi-channel signal.

    Parameters
    ----------
    manifold : {"s2", "so3"}
    bandwidth : int
        Maximum degree ``L``.
    data : ndarray of shape (n_channels, n_coefficients)
        Complex coefficients in the flat layout described in the module docstring.
    """

    manifold: str
    bandwidth: int
    data: np.ndarray

    def __post_init__(self):
        manifold = check_manifold(self.manifold)
        L = check_int(self.bandwidth, "bandwidth", minimum=0)
        data = check_complex_2d(self.data)
        if data.shape[1] != spectral_size(manifold, L):
            raise ValueError(
                f"{manifold} spectrum of bandwidth {L} needs {spectral_size(manifold, L)} "
                f"coefficients per channel, got {data.shape[1]}"
            )
        object.__setattr__(self, "manifold", manifold)
        object.__setattr__(self, "bandwidth", L)
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, manifold, L, channels=1, dtype=np.complex128):
        manifold = check_manifold(manifold)
        return cls(manifold, L, np.zeros((channels, spectral_size(manifold, L)), dtype=dtype))

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def dtype(self):
        return self.data.dtype

    def block(self, l):
        """View of degree ``l``: ``(C, 2l+1)`` on S^2, ``(C, 2l+1, 2l+1)`` on SO(3)."""
        if not 0 <= l <= self.bandwidth:
            raise IndexError(f"degree {l} outside 0..{self.bandwidth}")
        start = block_offset(self.manifold, l)
        if self.manifold == "s2":
            return self.data[:, start:start + 2 * l + 1]
        k = 2 * l + 1
        return self.data[:, start:start + k * k].reshape(self.channels, k, k)

    def blocks(self):
        return [self.block(l) for l in range(self.bandwidth + 1)]

    def truncate(self, L):
        """Keep degrees ``0..L``; zero-pads when ``L`` exceeds the bandwidth."""
        L = check_int(L, "L", minimum=0)
        n = spectral_size(self.manifold, L)
        if L <= self.bandwidth:
            return Spectrum(self.manifold, L, self.data[:, :n].copy())
        out = np.zeros((self.channels, n), dtype=self.dtype)
        out[:, :self.data.shape[1]] = self.data
        return Spectrum(self.manifold, L, out)

    def astype(self, dtype):
        return Spectrum(self.manifold, self.bandwidth, self.data.astype(dtype))

    def with_data(self, data):
        return Spectrum(self.manifold, self.bandwidth, data)

    def energy(self):
        return float(np.sum(np.abs(self.data.astype(np.complex128)) ** 2))

    def __add__(self, other):
        _check_compatible(self, other)
        return self.with_data(self.data + other.data)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_data(self.data - other.data)

    def __mul__(self, scalar):
        return self.with_data(self.data * scalar)

    __rmul__ = __mul__


def _check_compatible(a, b):
    if a.manifold != b.manifold or a.bandwidth != b.bandwidth or a.channels != b.channels:
        raise ValueError("spectra differ in manifold, bandwidth or channel count")


def conjugate_reflection(spec):
    """Spectrum of the complex conjugate signal.

    On S^2 ``conj(f)`` has coefficients ``(-1)^m conj(f_{l,-m})``; on SO(3)
    ``(-1)^(m-n) conj(f_{-m,-n})``.  A signal is real-valued exactly when it
    equals its own conjugate reflection.
    """
    out = np.empty_like(spec.data)
    for l in range(spec.bandwidth + 1):
        m = np.arange(-l, l + 1)
        src = spec.block(l)
        start = block_offset(spec.manifold, l)
        if spec.manifold == "s2":
            out[:, start:start + 2 * l + 1] = ((-1.0) ** m) * np.conj(src[:, ::-1])
        else:
            sign = (-1.0) ** (m[:, None] - m[None, :])
            k = 2 * l + 1
            out[:, start:start + k * k] = (sign * np.conj(src[:, ::-1, ::-1])).reshape(spec.channels, -1)
    return spec.with_data(out)


def real_part_spectrum(spec):
    """Spectrum of ``Re f``; the result satisfies the real-signal symmetry."""
    return spec.with_data(0.5 * (spec.data + conjugate_reflection(spec).data))


def random_spectrum(manifold, L, channels=1, decay=1.0, rng=None, real=False, dtype=np.complex128):
    """Complex Gaussian coefficients with amplitude profile ``(1+l)^-decay``.

    With ``real=True`` the spectrum is symmetrized so the synthesized signal
    is real-valued.
    """
    manifold = check_manifold(manifold)
    rng = np.random.default_rng(rng)
    n = spectral_size(manifold, L)
    z = (rng.standard_normal((channels, n)) + 1j * rng.standard_normal((channels, n))) / np.sqrt(2.0)
    z *= (1.0 + degree_index(manifold, L)) ** (-float(decay))
    spec = Spectrum(manifold, L, z)
    if real:
        spec = real_part_spectrum(spec)
    return spec.astype(dtype)


@dataclass(frozen=True)
class GridSignal:
    """Samples of a multi-channel function at the points of a quadrature rule.

    ``samples`` has shape ``(n_channels, rule.n_points)`` in the rule's point order.
    """

    rule: QuadratureRule
    samples: np.ndarray

    def __post_init__(self):
        samples = check_complex_2d(self.samples, "samples")
        if samples.shape[1] != self.rule.n_points:
            raise ValueError(
                f"rule has {self.rule.n_points} points but samples have {samples.shape[1]} columns"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def channels(self):
        return self.samples.shape[0]

    @property
    def manifold(self):
        return self.rule.manifold

    def grid(self):
        """Samples reshaped to ``(C, *rule.grid_shape)``."""
        return self.samples.reshape((self.channels,) + self.rule.grid_shape)
