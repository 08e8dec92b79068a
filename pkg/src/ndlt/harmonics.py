"""Basis functions and generalized Fourier transforms on S^2 and SO(3).

Conventions
-----------
* Spherical harmonics are orthonormal with the Condon-Shortley phase,
  ``Y_{l,-m} = (-1)^m conj(Y_{l,m})``.
* Rotations use ZYZ Euler angles, ``R = Rz(alpha) Ry(beta) Rz(gamma)``, and
  ``D^l_{mn}(R) = exp(-i m alpha) d^l_{mn}(beta) exp(-i n gamma)``.
* The SO(3) basis is ``u^l_{mn}(g) = sqrt((2l+1)/(8 pi^2)) conj(D^l_{mn}(g))``.
  With this choice the left-regular action ``f -> f(R^-1 .)`` multiplies every
  coefficient block from the left by ``D^l(R)`` on both manifolds.
* Quadrature weights enter once, in the analysis sums; analysis and synthesis
  are exact inverses for band-limited data.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
import scipy.fft

from ._validation import check_int
from .exceptions import PreconditionError
from .quadrature import make_rule
from .signals import GridSignal, Spectrum, block_offset, s2_size, so3_size

TWO_PI = 2.0 * np.pi


# ----------------------------------------------------------------------------
# Rotations


@dataclass(frozen=True)
class Rotation:
    """Rotation ``Rz(alpha) Ry(beta) Rz(gamma)``; alpha, gamma wrapped to [0, 2pi)."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        beta = float(self.beta)
        if not (-1e-12 <= beta <= np.pi + 1e-12):
            raise ValueError(f"beta must lie in [0, pi], got {beta}")
        object.__setattr__(self, "alpha", float(self.alpha) % TWO_PI)
        object.__setattr__(self, "beta", min(max(beta, 0.0), np.pi))
        object.__setattr__(self, "gamma", float(self.gamma) % TWO_PI)

    @classmethod
    def identity(cls):
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def random(cls, rng=None):
        """Haar-uniform rotation: alpha, gamma uniform, cos(beta) uniform."""
        rng = np.random.default_rng(rng)
        a, g = rng.uniform(0.0, TWO_PI, size=2)
        b = np.arccos(rng.uniform(-1.0, 1.0))
        return cls(a, b, g)

    def matrix(self):
        return _rz(self.alpha) @ _ry(self.beta) @ _rz(self.gamma)

    @classmethod
    def from_matrix(cls, R):
        R = np.asarray(R, dtype=float)
        cb = np.clip(R[2, 2], -1.0, 1.0)
        beta = np.arccos(cb)
        sb = np.hypot(R[0, 2], R[1, 2])
        if sb > 1e-12:
            alpha = np.arctan2(R[1, 2], R[0, 2])
            gamma = np.arctan2(R[2, 1], -R[2, 0])
        elif cb > 0:
            alpha, gamma, beta = np.arctan2(R[1, 0], R[0, 0]), 0.0, 0.0
        else:
            alpha, gamma, beta = np.arctan2(-R[0, 1], R[1, 1]), 0.0, np.pi
        return cls(alpha, beta, gamma)

    def inverse(self):
        return Rotation.from_matrix(self.matrix().T)

    def __matmul__(self, other):
        """Composition ``self o other`` (apply ``other`` first)."""
        return Rotation.from_matrix(self.matrix() @ other.matrix())


def _rz(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _ry(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def sphere_to_cartesian(alpha, beta):
    alpha, beta = np.asarray(alpha, float), np.asarray(beta, float)
    sb = np.sin(beta)
    return np.stack([sb * np.cos(alpha), sb * np.sin(alpha), np.cos(beta)], axis=-1)


def cartesian_to_sphere(xyz):
    xyz = np.asarray(xyz, float)
    r = np.linalg.norm(xyz, axis=-1)
    beta = np.arccos(np.clip(xyz[..., 2] / r, -1.0, 1.0))
    alpha = np.mod(np.arctan2(xyz[..., 1], xyz[..., 0]), TWO_PI)
    return alpha, beta


# ----------------------------------------------------------------------------
# Legendre functions and spherical harmonics


def assoc_legendre(l, m, t):
    """Associated Legendre function ``P_l^m(t)`` with Condon-Shortley phase.

    Uses the upward recurrence in ``m`` to ``P_m^m`` followed by the
    three-term recurrence in ``l``.  Unnormalized, so values grow like
    ``(l+m)!``; use :func:`normalized_legendre` for transforms.
    """
    l = check_int(l, "l", minimum=0)
    m = check_int(m, "m", minimum=0)
    if m > l:
        raise ValueError(f"order m={m} exceeds degree l={l}")
    t = np.asarray(t, dtype=float)
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    pmm = np.ones_like(t)
    for k in range(1, m + 1):
        pmm = -(2 * k - 1) * s * pmm
    if l == m:
        return pmm
    p_prev, p = pmm, (2 * m + 1) * t * pmm
    for k in range(m + 2, l + 1):
        p_prev, p = p, ((2 * k - 1) * t * p - (k + m - 1) * p_prev) / (k - m)
    return p


def normalized_legendre(L, t):
    """Table ``P[l, m, :]`` of ``sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(t)``.

    Entries with ``m > l`` are zero.  The recurrence runs on normalized values
    so it stays finite to high degree.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    P = np.zeros((L + 1, L + 1) + t.shape)
    P[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, L + 1):
        P[m, m] = -np.sqrt((2 * m + 1) / (2.0 * m)) * s * P[m - 1, m - 1]
    for m in range(0, L):
        P[m + 1, m] = np.sqrt(2 * m + 3.0) * t * P[m, m]
        for l in range(m + 2, L + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[l, m] = a * (t * P[l - 1, m] - b * P[l - 2, m])
    return P


def sph_harm(l, m, alpha, beta):
    """Orthonormal spherical harmonic ``Y_{l,m}(alpha, beta)``.

    ``alpha`` is the longitude and ``beta`` the colatitude.
    """
    l = check_int(l, "l", minimum=0)
    m = check_int(m, "m")
    if abs(m) > l:
        raise ValueError(f"|m|={abs(m)} exceeds degree l={l}")
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    P = normalized_legendre(l, np.cos(beta).ravel())[l, abs(m)].reshape(beta.shape)
    if m < 0:
        P = P * (-1.0) ** m
    return P * np.exp(1j * m * alpha)


def s2_basis(L, alpha, beta):
    """Matrix ``B[k, idx(l,m)] = Y_{l,m}(alpha_k, beta_k)`` for ``l <= L``."""
    alpha = np.atleast_1d(np.asarray(alpha, float))
    beta = np.atleast_1d(np.asarray(beta, float))
    P = normalized_legendre(L, np.cos(beta))
    B = np.empty((alpha.size, s2_size(L)), dtype=complex)
    for l in range(L + 1):
        for m in range(-l, l + 1):
            sign = (-1.0) ** m if m < 0 else 1.0
            B[:, l * l + l + m] = sign * P[l, abs(m)] * np.exp(1j * m * alpha)
    return B


# ----------------------------------------------------------------------------
# Wigner d and D


def _edge_row(l, beta):
    """``d^l_{l,n}(beta)`` for ``n = -l..l``; shape ``(n_beta, 2l+1)``."""
    c = np.cos(beta / 2.0)[:, None]
    s = np.sin(beta / 2.0)[:, None]
    n = np.arange(-l, l + 1)
    binom = np.sqrt(np.array([float(math.comb(2 * l, l + k)) for k in n]))
    return ((-1.0) ** (l - n)) * binom * c ** (l + n) * s ** (l - n)


def wigner_d_all(L, beta):
    """Small Wigner-d matrices ``d^l(beta)`` for ``l = 0..L``.

    Computed with the three-term recurrence in ``l`` at fixed ``(m, n)``;
    entries with ``max(|m|, |n|) = l`` are seeded from the closed-form edge
    values.  Returns a list whose item ``l`` has shape ``(n_beta, 2l+1, 2l+1)``
    (or ``(2l+1, 2l+1)`` for scalar ``beta``).
    """
    L = check_int(L, "L", minimum=0)
    scalar = np.ndim(beta) == 0
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    nb = beta.size
    cb = np.cos(beta)[:, None, None]
    out = [np.ones((nb, 1, 1))]
    for l in range(1, L + 1):
        k = 2 * l + 1
        m = np.arange(-l, l + 1)
        M, N = np.meshgrid(m, m, indexing="ij")
        d = np.zeros((nb, k, k))
        prev = np.zeros((nb, k, k))
        prev[:, 1:-1, 1:-1] = out[l - 1]
        if l == 1:
            d[:, 1, 1] = cb[:, 0, 0]
        else:
            prev2 = np.zeros((nb, k, k))
            prev2[:, 2:-2, 2:-2] = out[l - 2]
            inner = (np.abs(M) < l) & (np.abs(N) < l)
            Mi, Ni = M[inner], N[inner]
            scale = l * (2 * l - 1) / np.sqrt((l * l - Mi * Mi) * (l * l - Ni * Ni * 1.0))
            c1 = Mi * Ni / (l * (l - 1.0))
            c2 = np.sqrt(((l - 1.0) ** 2 - Mi * Mi) * ((l - 1.0) ** 2 - Ni * Ni)) / ((l - 1.0) * (2 * l - 1))
            d[:, inner] = scale * ((cb[:, :, 0] - c1) * prev[:, inner] - c2 * prev2[:, inner])
        edge = _edge_row(l, beta)
        sign = (-1.0) ** (l + m)
        d[:, -1, :] = edge                            # m = l
        d[:, 0, :] = sign * edge[:, ::-1]             # m = -l: (-1)^(l+n) d_{l,-n}
        d[:, :, -1] = ((-1.0) ** (l - m)) * edge      # n = l: (-1)^(l-m) d_{l,m}
        d[:, :, 0] = edge[:, ::-1]                    # n = -l: d_{l,-m}
        out.append(d)
    if scalar:
        out = [d[0] for d in out]
    return out


def wigner_d(l, beta):
    """Real orthogonal matrix ``d^l(beta)``, rows/cols indexed ``-l..l``."""
    l = check_int(l, "l", minimum=0)
    beta = float(beta)
    if not (-1e-12 <= beta <= np.pi + 1e-12):
        raise ValueError(f"beta must lie in [0, pi], got {beta}")
    return wigner_d_all(l, beta)[l]


def wigner_D_all(L, rotation):
    """Wigner-D matrices ``D^l(R)`` for ``l = 0..L``."""
    small = wigner_d_all(L, rotation.beta)
    out = []
    for l, d in enumerate(small):
        m = np.arange(-l, l + 1)
        ea = np.exp(-1j * m * rotation.alpha)
        eg = np.exp(-1j * m * rotation.gamma)
        out.append(ea[:, None] * d * eg[None, :])
    return out


def wigner_D(l, rotation):
    """Unitary matrix ``D^l_{mn}(R) = e^{-i m alpha} d^l_{mn}(beta) e^{-i n gamma}``."""
    l = check_int(l, "l", minimum=0)
    return wigner_D_all(l, rotation)[l]


def so3_basis(L, points):
    """Matrix ``B[k, idx(l,m,n)] = u^l_{mn}(g_k)`` of orthonormal SO(3) basis values."""
    points = np.atleast_2d(np.asarray(points, float))
    a, b, g = points[:, 0], points[:, 1], points[:, 2]
    small = wigner_d_all(L, b)
    B = np.empty((points.shape[0], so3_size(L)), dtype=complex)
    for l, d in enumerate(small):
        m = np.arange(-l, l + 1)
        c = np.sqrt((2 * l + 1) / (8.0 * np.pi ** 2))
        vals = c * np.exp(1j * m[None, :, None] * a[:, None, None]) * d * np.exp(1j * m[None, None, :] * g[:, None, None])
        start = block_offset("so3", l)
        B[:, start:start + (2 * l + 1) ** 2] = vals.reshape(points.shape[0], -1)
    return B


# ----------------------------------------------------------------------------
# Transforms


@lru_cache(maxsize=32)
def _s2_legendre_table(L):
    rule = make_rule("s2", L)
    P = normalized_legendre(L, np.cos(rule.betas))
    P.setflags(write=False)
    return P


@lru_cache(maxsize=8)
def _so3_d_table(L):
    rule = make_rule("so3", L)
    table = wigner_d_all(L, rule.betas)
    for d in table:
        d.setflags(write=False)
    return table


def _check_rule(signal, manifold):
    if signal.rule.manifold != manifold:
        raise ValueError(f"expected samples on a {manifold} rule, got {signal.rule.manifold}")


def s2_analysis(signal, bandwidth=None):
    """Spherical harmonic coefficients ``sum_k w_k f(x_k) conj(Y_lm(x_k))``.

    FFT along the equispaced longitudes, direct sums over latitude.

    Parameters
    ----------
    signal : GridSignal
        Samples on an :func:`~ndlt.quadrature.s2_rule` grid.
    bandwidth : int, optional
        Output bandwidth, at most the rule bandwidth (default).
    """
    _check_rule(signal, "s2")
    rule = signal.rule
    Lr = rule.bandwidth
    L = Lr if bandwidth is None else check_int(bandwidth, "bandwidth", minimum=0)
    if L > Lr:
        raise PreconditionError(f"rule of bandwidth {Lr} cannot resolve degree {L}")
    grid = signal.grid()                                   # (C, 2Lr+1, Lr+1)
    fdtype = np.float32 if grid.dtype == np.complex64 else np.float64
    A = scipy.fft.fft(grid, axis=1)                        # (C, q, i)
    P = _s2_legendre_table(Lr).astype(fdtype, copy=False)
    w = (rule.beta_weights * (TWO_PI / (2 * Lr + 1))).astype(fdtype)
    out = np.zeros((grid.shape[0], s2_size(L)), dtype=grid.dtype)
    ls = np.arange(L + 1)
    for m in range(-L, L + 1):
        am = abs(m)
        lm = ls[am:]
        sign = (-1.0) ** m if m < 0 else 1.0
        Pm = P[am:L + 1, am] * (w * sign).astype(fdtype)    # (nl, i)
        out[:, lm * lm + lm + m] = A[:, m % (2 * Lr + 1), :] @ Pm.T
    return Spectrum("s2", L, out)


def s2_synthesis(spectrum, rule):
    """Evaluate ``sum_lm f_lm Y_lm`` at the points of an S^2 rule."""
    if spectrum.manifold != "s2" or rule.manifold != "s2":
        raise ValueError("s2_synthesis needs an S^2 spectrum and an S^2 rule")
    L, Lr = spectrum.bandwidth, rule.bandwidth
    if L > Lr:
        raise PreconditionError(f"rule of bandwidth {Lr} cannot carry degree {L}")
    data = spectrum.data
    fdtype = np.float32 if data.dtype == np.complex64 else np.float64
    P = _s2_legendre_table(Lr).astype(fdtype, copy=False)
    C = data.shape[0]
    nq = 2 * Lr + 1
    B = np.zeros((C, nq, Lr + 1), dtype=data.dtype)
    ls = np.arange(L + 1)
    for m in range(-L, L + 1):
        am = abs(m)
        lm = ls[am:]
        sign = (-1.0) ** m if m < 0 else 1.0
        B[:, m % nq, :] = data[:, lm * lm + lm + m] @ (P[am:L + 1, am] * fdtype(sign))
    grid = scipy.fft.ifft(B, axis=1) * nq
    return GridSignal(rule, grid.reshape(C, -1))


def so3_analysis(signal, bandwidth=None):
    """Coefficients ``sum_k w_k f(g_k) conj(u^l_mn(g_k))`` on an SO(3) rule."""
    _check_rule(signal, "so3")
    rule = signal.rule
    Lr = rule.bandwidth
    L = Lr if bandwidth is None else check_int(bandwidth, "bandwidth", minimum=0)
    if L > Lr:
        raise PreconditionError(f"rule of bandwidth {Lr} cannot resolve degree {L}")
    grid = signal.grid()                                   # (C, a, i, g)
    fdtype = np.float32 if grid.dtype == np.complex64 else np.float64
    nq = 2 * Lr + 1
    F = scipy.fft.fft2(grid, axes=(1, 3)).transpose(0, 2, 1, 3)   # (C, i, m, n)
    table = _so3_d_table(Lr)
    w = rule.beta_weights * (TWO_PI / nq) ** 2
    C = grid.shape[0]
    out = np.empty((C, so3_size(L)), dtype=grid.dtype)
    for l in range(L + 1):
        idx = np.arange(-l, l + 1) % nq
        sub = F[:, :, idx[:, None], idx[None, :]]
        c = np.sqrt((2 * l + 1) / (8.0 * np.pi ** 2))
        dw = (table[l] * (c * w)[:, None, None]).astype(fdtype)   # (i, m, n)
        blk = np.einsum("cimn,imn->cmn", sub, dw)
        start = block_offset("so3", l)
        out[:, start:start + (2 * l + 1) ** 2] = blk.reshape(C, -1)
    return Spectrum("so3", L, out)


def so3_synthesis(spectrum, rule):
    """Evaluate ``sum f^l_mn u^l_mn`` at the points of an SO(3) rule."""
    if spectrum.manifold != "so3" or rule.manifold != "so3":
        raise ValueError("so3_synthesis needs an SO(3) spectrum and an SO(3) rule")
    L, Lr = spectrum.bandwidth, rule.bandwidth
    if L > Lr:
        raise PreconditionError(f"rule of bandwidth {Lr} cannot carry degree {L}")
    data = spectrum.data
    fdtype = np.float32 if data.dtype == np.complex64 else np.float64
    table = _so3_d_table(Lr)
    C = data.shape[0]
    nq = 2 * Lr + 1
    G = np.zeros((C, Lr + 1, nq, nq), dtype=data.dtype)      # (C, i, m, n)
    for l in range(L + 1):
        idx = np.arange(-l, l + 1) % nq
        c = np.sqrt((2 * l + 1) / (8.0 * np.pi ** 2))
        G[:, :, idx[:, None], idx[None, :]] += spectrum.block(l)[:, None] * (c * table[l]).astype(fdtype)
    grid = scipy.fft.ifft2(G, axes=(2, 3)) * (nq * nq)
    grid = np.ascontiguousarray(grid.transpose(0, 2, 1, 3))
    return GridSignal(rule, grid.reshape(C, -1))


def analysis(signal, bandwidth=None):
    """Forward transform dispatching on the rule's manifold."""
    if signal.rule.manifold == "s2":
        return s2_analysis(signal, bandwidth)
    return so3_analysis(signal, bandwidth)


def synthesis(spectrum, rule=None):
    """Inverse transform; defaults to the manifold rule at the spectrum bandwidth."""
    if rule is None:
        rule = make_rule(spectrum.manifold, max(spectrum.bandwidth, 1))
    if spectrum.manifold == "s2":
        return s2_synthesis(spectrum, rule)
    return so3_synthesis(spectrum, rule)


def evaluate(spectrum, points):
    """Direct evaluation of the synthesized signal at arbitrary points.

    ``points`` are ``(alpha, beta)`` pairs on S^2 or ZYZ triples on SO(3).
    Returns an array of shape ``(C, n_points)``.
    """
    points = np.atleast_2d(np.asarray(points, float))
    if spectrum.manifold == "s2":
        B = s2_basis(spectrum.bandwidth, points[:, 0], points[:, 1])
    else:
        B = so3_basis(spectrum.bandwidth, points)
    return spectrum.data @ B.T
