"""Polynomial-exact tensor-product quadrature on [-1, 1], S^2 and SO(3).

All rules combine Gauss-Legendre nodes in ``cos(beta)`` with equispaced
longitudes (and, on SO(3), equispaced third Euler angles).  Point order is
fixed so that flattened sample arrays are bit-stable:

* S^2: alpha-major, then beta  -> grid shape ``(2L+1, L+1)``
* SO(3): alpha, then beta, then gamma -> grid shape ``(2L+1, L+1, 2L+1)``
"""
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_manifold
from .exceptions import ConvergenceError

_MAX_NEWTON_ITER = 100
_NEWTON_TOL = 1e-15


@dataclass(frozen=True)
class GaussLegendre1D:
    """Gauss-Legendre rule of ``order`` points on [-1, 1], nodes ascending."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray


def _legendre_and_derivative(n, x):
    """Evaluate P_n and P_n' at ``x`` with the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    # P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre(n):
    """Gauss-Legendre nodes and weights by Newton iteration on P_n.

    Parameters
    ----------
    n : int
        Number of nodes, ``n >= 1``.  The rule integrates polynomials of
        degree ``<= 2n - 1`` exactly.

    Returns
    -------
    GaussLegendre1D
    """
    n = check_int(n, "n", minimum=1)
    if n == 1:
        return GaussLegendre1D(1, np.array([0.0]), np.array([2.0]))
    i = np.arange(1, n + 1)
    # Tricomi's Chebyshev-like initial guess, descending in x.
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    x = x * (1.0 - (n - 1.0) / (8.0 * n ** 3))
    for _ in range(_MAX_NEWTON_ITER):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    else:
        raise ConvergenceError(f"Newton iteration for P_{n} roots did not converge")
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce exact antisymmetry of the node set
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return GaussLegendre1D(n, x, w)


@dataclass(frozen=True)
class QuadratureRule:
    """Sample points and positive weights on S^2 or SO(3).

    Attributes
    ----------
    manifold : {"s2", "so3"}
    bandwidth : int
        Maximum harmonic degree ``L`` whose basis products are integrated exactly.
    points : ndarray of shape (n_points, 2) or (n_points, 3)
        ``(alpha, beta)`` or ``(alpha, beta, gamma)`` in radians.
    weights : ndarray of shape (n_points,)
    exactness_degree : int
        Polynomial degree integrated exactly (``2L+1`` on S^2, ``2L`` on SO(3)
        for products of Wigner-D entries).
    """

    manifold: str
    bandwidth: int
    points: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    @property
    def n_points(self):
        return self.weights.shape[0]

    @property
    def grid_shape(self):
        L = self.bandwidth
        if self.manifold == "s2":
            return (2 * L + 1, L + 1)
        return (2 * L + 1, L + 1, 2 * L + 1)

    @property
    def alphas(self):
        return 2.0 * np.pi * np.arange(2 * self.bandwidth + 1) / (2 * self.bandwidth + 1)

    @property
    def betas(self):
        return _latitudes(self.bandwidth)[0]

    @property
    def beta_weights(self):
        return _latitudes(self.bandwidth)[1]

    @property
    def gammas(self):
        if self.manifold != "so3":
            raise AttributeError("gammas only exist on SO(3) rules")
        return self.alphas


def _latitudes(L):
    gl = gauss_legendre(L + 1)
    # ascending beta <=> descending cos(beta)
    t = gl.nodes[::-1]
    return np.arccos(t), gl.weights[::-1].copy(), t


def s2_rule(L):
    """Gauss-Legendre x equispaced rule on S^2, exact for degree ``2L+1``."""
    L = check_int(L, "L", minimum=1)
    betas, wb, _ = _latitudes(L)
    alphas = 2.0 * np.pi * np.arange(2 * L + 1) / (2 * L + 1)
    a, b = np.meshgrid(alphas, betas, indexing="ij")
    weights = np.broadcast_to(wb * (2.0 * np.pi / (2 * L + 1)), a.shape)
    points = np.stack([a.ravel(), b.ravel()], axis=1)
    return QuadratureRule("s2", L, points, weights.ravel().copy(), 2 * L + 1)


def so3_rule(L):
    """Gauss-Legendre x equispaced x equispaced rule on SO(3) (ZYZ angles)."""
    L = check_int(L, "L", minimum=1)
    betas, wb, _ = _latitudes(L)
    alphas = 2.0 * np.pi * np.arange(2 * L + 1) / (2 * L + 1)
    a, b, g = np.meshgrid(alphas, betas, alphas, indexing="ij")
    dw = (2.0 * np.pi / (2 * L + 1)) ** 2
    weights = np.broadcast_to((wb * dw)[np.newaxis, :, np.newaxis], a.shape)
    points = np.stack([a.ravel(), b.ravel(), g.ravel()], axis=1)
    return QuadratureRule("so3", L, points, weights.ravel().copy(), 2 * L)


def make_rule(manifold, L):
    """Rule for ``manifold`` at bandwidth ``L``."""
    return s2_rule(L) if check_manifold(manifold) == "s2" else so3_rule(L)
