"""Fourier profiles of the needlet filter bank {a; b1, b2} and generators {alpha; beta1, beta2}.

All profiles are even in ``xi`` and take values in [0, 1].  Supports:

==========  ===============
profile     support of |xi|
==========  ===============
a           [0, 1/4]
b1          [1/8, 1/2]
b2          [1/4, 1/2]
alpha       [0, 1/2]
beta1       [1/4, 1]
beta2       [1/2, 1]
==========  ===============

The filters are zero-extended beyond ``|xi| = 1/2``.  The generators satisfy
the two-scale relations ``alpha(2 xi) = a(xi) alpha(xi)`` and
``beta_n(2 xi) = b_n(xi) alpha(xi)``.
"""
import numpy as np

FILTERS = ("a", "b1", "b2")
GENERATORS = ("alpha", "beta1", "beta2")


def nu(t):
    """Smooth ramp ``t^4 (35 - 84 t + 70 t^2 - 20 t^3)``, clamped to 0 below 0 and 1 above 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t ** 4 * (35.0 - 84.0 * t + 70.0 * t ** 2 - 20.0 * t ** 3)


def _sin_ramp(t):
    return np.sin(0.5 * np.pi * nu(t))


def _cos_ramp(t):
    # cos(pi/2 nu) written as sin(pi/2 (1 - nu)) so the endpoints are exactly 0 and 1
    return np.sin(0.5 * np.pi * (1.0 - nu(t)))


def filter_hat(kind, xi):
    """Evaluate filter profile ``kind`` in {"a", "b1", "b2"} at ``xi``."""
    x = np.abs(np.asarray(xi, dtype=float))
    zero = np.zeros_like(x)
    if kind == "a":
        return np.where(x < 0.125, 1.0, np.where(x <= 0.25, _cos_ramp(8.0 * x - 1.0), zero))
    if kind == "b1":
        return np.where(
            x < 0.125, zero,
            np.where(x <= 0.25, _sin_ramp(8.0 * x - 1.0),
                     np.where(x <= 0.5, _cos_ramp(4.0 * x - 1.0), zero)))
    if kind == "b2":
        return np.where((x >= 0.25) & (x <= 0.5), _sin_ramp(4.0 * x - 1.0), zero)
    raise ValueError(f"unknown filter {kind!r}; expected one of {FILTERS}")


def generator_hat(kind, xi):
    """Evaluate generator profile ``kind`` in {"alpha", "beta1", "beta2"} at ``xi``.

    ``beta2`` is ``sin(pi/2 nu(2|xi|-1)) cos(pi/2 nu(2|xi|-1))`` on [1/2, 1],
    i.e. ``1/2 sin(pi nu(2|xi|-1))``, the form fixed by the two-scale relation
    with ``b2``.
    """
    x = np.abs(np.asarray(xi, dtype=float))
    zero = np.zeros_like(x)
    if kind == "alpha":
        return np.where(x < 0.25, 1.0, np.where(x <= 0.5, _cos_ramp(4.0 * x - 1.0), zero))
    if kind == "beta1":
        c = _cos_ramp(2.0 * x - 1.0)
        return np.where(
            x < 0.25, zero,
            np.where(x < 0.5, _sin_ramp(4.0 * x - 1.0), np.where(x <= 1.0, c * c, zero)))
    if kind == "beta2":
        t = 2.0 * x - 1.0
        return np.where((x >= 0.5) & (x <= 1.0), _sin_ramp(t) * _cos_ramp(t), zero)
    raise ValueError(f"unknown generator {kind!r}; expected one of {GENERATORS}")


def profile(kind, xi):
    """Evaluate any filter or generator profile by name."""
    if kind in FILTERS:
        return filter_hat(kind, xi)
    return generator_hat(kind, xi)


def degree_response(kind, L, scale):
    """Profile ``kind`` sampled at ``l / 2**scale`` for ``l = 0..L``."""
    return profile(kind, np.arange(L + 1) / float(2 ** scale))


def sample_profiles(n):
    """Table of all six profiles on ``n`` equispaced points of [0, 1].

    Returns ``(xi, {name: values})``.
    """
    xi = np.linspace(0.0, 1.0, n)
    return xi, {k: profile(k, xi) for k in FILTERS + GENERATORS}


def identity_residuals(n=10_000):
    """Maximum residuals of the filter-bank identities on ``n`` points.

    Returns a dict with

    * ``partition``: ``|a|^2 + |b1|^2 + |b2|^2 - 1`` on [0, 1/2];
    * ``refinement``: ``alpha(2 xi) - a(xi) alpha(xi)`` and
      ``beta_n(2 xi) - b_n(xi) alpha(xi)`` on [0, 1/2];
    * ``generator_partition``: ``alpha(xi/2)^2 + sum_n beta_n(xi/2)^2 - alpha(xi)^2``
      on [0, 1], the generator form of the same identity.
    """
    xi = np.linspace(0.0, 0.5, n)
    part = filter_hat("a", xi) ** 2 + filter_hat("b1", xi) ** 2 + filter_hat("b2", xi) ** 2 - 1.0
    alpha = generator_hat("alpha", xi)
    refine = max(
        float(np.max(np.abs(generator_hat("alpha", 2 * xi) - filter_hat("a", xi) * alpha))),
        float(np.max(np.abs(generator_hat("beta1", 2 * xi) - filter_hat("b1", xi) * alpha))),
        float(np.max(np.abs(generator_hat("beta2", 2 * xi) - filter_hat("b2", xi) * alpha))),
    )
    x = np.linspace(0.0, 1.0, n)
    gen = (generator_hat("alpha", x) ** 2 + generator_hat("beta1", x) ** 2
           + generator_hat("beta2", x) ** 2 - generator_hat("alpha", x / 2) ** 2)
    return {
        "partition": float(np.max(np.abs(part))),
        "refinement": refine,
        "generator_partition": float(np.max(np.abs(gen))),
    }
