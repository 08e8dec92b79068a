"""Multi-level needlet decomposition and reconstruction in the frequency domain.

Eigenvalues are indexed by degree, ``lambda_l = l``.  At scale ``j`` the
low-pass sequence ``v_j`` carries degrees ``l <= 2**(j-1)`` and the high-pass
sequences ``w^n_j`` (``n = 1, 2``) carry ``l <= 2**j``.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from ._validation import check_int
from .exceptions import PreconditionError
from .filterbank import degree_response
from .harmonics import analysis, evaluate, s2_basis, so3_basis, synthesis
from .quadrature import make_rule
from .signals import GridSignal, Spectrum, degree_index

BAND_KINDS = ("lowpass", "hp1", "hp2")
_GRAM_CAP = {"s2": 16, "so3": 4}


def lowpass_bandwidth(j):
    """Largest degree carried by ``v_j``."""
    return 2 ** (j - 1)


def highpass_bandwidth(j):
    """Largest degree carried by ``w^n_j``."""
    return 2 ** j


def fine_scale(L):
    """Finest scale ``J = ceil(log2 L) + 1`` for input bandwidth ``L``."""
    L = check_int(L, "L", minimum=1)
    return int(math.ceil(math.log2(L))) + 1 if L > 1 else 1


def scale_degrees(spec, weights, L_out=None):
    """Multiply degree-``l`` coefficients by ``weights[l]``, optionally changing bandwidth."""
    L_out = spec.bandwidth if L_out is None else L_out
    src = spec.truncate(L_out) if L_out != spec.bandwidth else spec
    w = np.asarray(weights)[: L_out + 1]
    mult = w[degree_index(spec.manifold, L_out)].astype(src.data.real.dtype)
    return src.with_data(src.data * mult)


@dataclass(frozen=True)
class NeedletCoefficients:
    """Low-pass sequence at the coarse scale plus two high-pass sequences per scale.

    Attributes
    ----------
    manifold : {"s2", "so3"}
    coarse_scale : int
        ``J0``.
    fine_scale : int
        ``J``; high-pass scales run over ``J0 .. J-1``.
    bandwidth : int
        Bandwidth of the original input, restored by :func:`reconstruct`.
    lowpass : Spectrum
        ``v_{J0}`` with bandwidth ``2**(J0-1)``.
    highpass : dict
        ``{(n, j): Spectrum}`` for ``n in (1, 2)``, bandwidth ``2**j``.
    """

    manifold: str
    coarse_scale: int
    fine_scale: int
    bandwidth: int
    lowpass: Spectrum
    highpass: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.coarse_scale < self.fine_scale:
            raise ValueError(f"need 1 <= J0 < J, got J0={self.coarse_scale}, J={self.fine_scale}")
        if self.lowpass.bandwidth != lowpass_bandwidth(self.coarse_scale):
            raise ValueError("low-pass bandwidth inconsistent with coarse scale")
        expected = {(n, j) for j in self.scales for n in (1, 2)}
        if set(self.highpass) != expected:
            raise ValueError("high-pass bands inconsistent with scale range")
        for (n, j), band in self.highpass.items():
            if band.bandwidth != highpass_bandwidth(j) or band.manifold != self.manifold:
                raise ValueError(f"high-pass band ({n}, {j}) has wrong bandwidth or manifold")

    @property
    def scales(self):
        return range(self.coarse_scale, self.fine_scale)

    @property
    def channels(self):
        return self.lowpass.channels

    def bands(self):
        """Bands in storage order: low-pass, then ``w1_j, w2_j`` for ascending ``j``."""
        out = [(("lowpass", self.coarse_scale), self.lowpass)]
        for j in self.scales:
            out.append((("hp1", j), self.highpass[(1, j)]))
            out.append((("hp2", j), self.highpass[(2, j)]))
        return out

    def highpass_bands(self):
        return [band for (kind, _), band in self.bands() if kind != "lowpass"]

    def map_bands(self, func, highpass_only=False):
        """New coefficients with ``func(band)`` applied to every (or every high-pass) band."""
        low = self.lowpass if highpass_only else func(self.lowpass)
        high = {key: func(band) for key, band in self.highpass.items()}
        manifold = next(iter(high.values())).manifold if high else low.manifold
        return NeedletCoefficients(manifold, self.coarse_scale, self.fine_scale,
                                   self.bandwidth, low, high)

    def energy(self):
        return sum(band.energy() for _, band in self.bands())


def decompose(spectrum, coarse_scale, fine=None):
    """Multi-level needlet decomposition of a band-limited spectrum.

    Runs ``v_{j-1} = v_j a(l/2^j)`` and ``w^n_{j-1} = v_j b_n(l/2^j)`` for
    ``j = J .. J0+1`` starting from ``v_J`` = the input (zero-padded to
    ``2**(J-1)``).

    Parameters
    ----------
    spectrum : Spectrum
    coarse_scale : int
        ``J0 >= 1``.
    fine : int, optional
        ``J``; defaults to :func:`fine_scale` of the input bandwidth.

    Returns
    -------
    NeedletCoefficients
    """
    L = spectrum.bandwidth
    J = fine_scale(max(L, 1)) if fine is None else check_int(fine, "fine", minimum=1)
    if lowpass_bandwidth(J) < L:
        raise ValueError(f"fine scale J={J} cannot carry bandwidth {L}")
    J0 = check_int(coarse_scale, "coarse_scale", minimum=1)
    if J0 >= J:
        raise ValueError(f"coarse scale J0={J0} must be below the fine scale J={J}")
    v = spectrum.truncate(lowpass_bandwidth(J))
    highpass = {}
    for j in range(J, J0, -1):
        Lj = lowpass_bandwidth(j)
        # filters are real, so conj() is the identity on their values
        highpass[(1, j - 1)] = scale_degrees(v, degree_response("b1", Lj, j))
        highpass[(2, j - 1)] = scale_degrees(v, degree_response("b2", Lj, j))
        v = scale_degrees(v, degree_response("a", Lj, j), lowpass_bandwidth(j - 1))
    return NeedletCoefficients(spectrum.manifold, J0, J, L, v, highpass)


def reconstruct(coeffs):
    """Invert :func:`decompose`: ``v_j = v_{j-1} a(l/2^j) + sum_n w^n_{j-1} b_n(l/2^j)``."""
    v = coeffs.lowpass
    for j in range(coeffs.coarse_scale + 1, coeffs.fine_scale + 1):
        Lj = lowpass_bandwidth(j)
        v = scale_degrees(v, degree_response("a", Lj, j), Lj)
        for n, kind in ((1, "b1"), (2, "b2")):
            w = coeffs.highpass[(n, j - 1)]
            if w.manifold != v.manifold:
                raise ValueError("bands live on different manifolds")
            v = v + scale_degrees(w, degree_response(kind, Lj, j))
    return v.truncate(coeffs.bandwidth)


def band_rule(manifold, band_bandwidth):
    """Quadrature rule used for the spatial sequence of a band.

    Its exactness is at least ``4 * band_bandwidth``, i.e. ``2**(j+1)`` for
    ``v_j`` and ``2**(j+2)`` for ``w_j`` (the scale ``j+1`` rule).
    """
    return make_rule(manifold, 2 * band_bandwidth)


def spatial_coeffs(coeffs, rules=None):
    """Spatial needlet coefficients ``sqrt(w_k) * band(x_k)`` for every band.

    Parameters
    ----------
    coeffs : NeedletCoefficients
    rules : dict, optional
        ``{band_key: QuadratureRule}`` overriding :func:`band_rule`.  Each rule
        must be exact to degree ``4 * band_bandwidth``.

    Returns
    -------
    dict
        ``{band_key: GridSignal}``; keys as in :meth:`NeedletCoefficients.bands`.
    """
    rules = rules or {}
    out = {}
    for key, band in coeffs.bands():
        rule = rules.get(key) or band_rule(band.manifold, band.bandwidth)
        if rule.exactness_degree < 4 * band.bandwidth or rule.manifold != band.manifold:
            raise PreconditionError(
                f"band {key} needs a {band.manifold} rule exact to degree {4 * band.bandwidth}, "
                f"got {rule.manifold} rule of exactness {rule.exactness_degree}"
            )
        grid = synthesis(band, rule)
        out[key] = GridSignal(rule, grid.samples * np.sqrt(rule.weights))
    return out


def spatial_to_spectral(sequence, bandwidth):
    """Recover band coefficients from a spatial sequence produced by :func:`spatial_coeffs`."""
    rule = sequence.rule
    return analysis(GridSignal(rule, sequence.samples / np.sqrt(rule.weights)), bandwidth)


def needlet_kernel(j, y, x, kind="lowpass", bandwidth=None):
    """Needlet ``sum_l h(l/2^j) sum_m conj(u_lm(y)) u_lm(x)`` by direct spectral sum.

    ``h`` is alpha for "lowpass", beta1 for "hp1" and beta2 for "hp2"; the sum
    runs over ``l <= 2**j`` (the generator supports), capped at ``bandwidth``.
    ``y`` and ``x`` are points on S^2 ``(alpha, beta)`` or SO(3) ``(alpha, beta, gamma)``.
    """
    j = check_int(j, "j", minimum=1)
    gen = {"lowpass": "alpha", "hp1": "beta1", "hp2": "beta2"}.get(kind)
    if gen is None:
        raise ValueError(f"kind must be one of {BAND_KINDS}")
    y = np.asarray(y, float)
    x = np.atleast_2d(np.asarray(x, float))
    manifold = "s2" if y.shape[-1] == 2 else "so3"
    Lk = 2 ** j if bandwidth is None else min(2 ** j, check_int(bandwidth, "bandwidth", minimum=0))
    h = degree_response(gen, Lk, j)
    if manifold == "s2":
        uy = s2_basis(Lk, y[0], y[1])[0]
    else:
        uy = so3_basis(Lk, y[None, :])[0]
    coeff = Spectrum(manifold, Lk, (np.conj(uy) * h[degree_index(manifold, Lk)])[None, :])
    vals = evaluate(coeff, x)[0]
    return vals if vals.size > 1 else vals[0]


def _gram(manifold, L, rule):
    if manifold == "s2":
        B = s2_basis(L, rule.points[:, 0], rule.points[:, 1])
    else:
        B = so3_basis(L, rule.points)
    return (B.conj().T * rule.weights) @ B


def verify_tightness(L, coarse_scale=1, trials=10, manifold="s2", rng=None):
    """Numerically check the tight-frame identities on random band-limited signals.

    Reports the maximum relative residual of

    * ``reconstruction``: ``reconstruct(decompose(f)) = f``;
    * ``energy``: per-level ``sum_k |v_{j+1,k}|^2 = sum_k |v_{j,k}|^2 + sum_{n,k} |w^n_{j,k}|^2``
      with the sums taken over quadrature-sampled spatial coefficients;
    * ``gram``: ``U_{l,l'}(Q) = delta_{l,l'}`` for every rule used, together with
      the generator identity ``alpha(l/2^{j+1})^2 = alpha(l/2^j)^2 + sum_n beta_n(l/2^j)^2``.
    """
    from .signals import random_spectrum

    rng = np.random.default_rng(rng)
    J = fine_scale(L)
    report = {"reconstruction": 0.0, "energy": 0.0, "gram": 0.0}
    for _ in range(trials):
        f = random_spectrum(manifold, L, rng=rng)
        c = decompose(f, coarse_scale, J)
        rec = reconstruct(c)
        report["reconstruction"] = max(
            report["reconstruction"], float(np.linalg.norm(rec.data - f.data) / np.linalg.norm(f.data)))
        # low-pass spatial energy at every scale J0..J
        low_energy = {}
        v = f.truncate(lowpass_bandwidth(J))
        for j in range(J, coarse_scale - 1, -1):
            seq = spatial_coeffs_single(v, band_rule(manifold, v.bandwidth))
            low_energy[j] = float(np.sum(np.abs(seq) ** 2))
            if j > coarse_scale:
                v = scale_degrees(v, degree_response("a", lowpass_bandwidth(j), j), lowpass_bandwidth(j - 1))
        spatial = spatial_coeffs(c)
        for j in c.scales:
            high = sum(float(np.sum(np.abs(spatial[(k, j)].samples) ** 2)) for k in ("hp1", "hp2"))
            resid = abs(low_energy[j + 1] - low_energy[j] - high) / max(low_energy[J], 1e-300)
            report["energy"] = max(report["energy"], resid)
    for j in range(coarse_scale, J + 1):
        for Lb in {lowpass_bandwidth(j), highpass_bandwidth(j)}:
            # dense Gram matrices; larger rules share the same tensor structure
            if Lb > _GRAM_CAP[manifold]:
                continue
            G = _gram(manifold, Lb, band_rule(manifold, Lb))
            report["gram"] = max(report["gram"], float(np.max(np.abs(G - np.eye(G.shape[0])))))
        ls = np.arange(lowpass_bandwidth(J) + 1)
        lhs = degree_response("alpha", ls[-1], j + 1) ** 2
        rhs = degree_response("alpha", ls[-1], j) ** 2 + sum(
            degree_response(k, ls[-1], j) ** 2 for k in ("beta1", "beta2"))
        report["gram"] = max(report["gram"], float(np.max(np.abs(lhs - rhs))))
    return report


def spatial_coeffs_single(band, rule):
    """Spatial sequence ``sqrt(w_k) * band(x_k)`` of one spectrum, shape ``(C, n_points)``."""
    return synthesis(band, rule).samples * np.sqrt(rule.weights)
