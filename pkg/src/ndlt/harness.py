"""Equivariance measurement, ablation and sensitivity experiments, test-signal generators."""
from dataclasses import dataclass, field
import numpy as np

from ._validation import check_int
from .convolution import FilterTriple, needlet_block_convolve, rotate
from .exceptions import DegenerateGeometryError, InvalidPipelineError
from .harmonics import Rotation, analysis, sphere_to_cartesian
from .layers import ShrinkageConfig, highpass_count, shrink, spatial_relu, spectral_pool
from .needlet import NeedletCoefficients, decompose, fine_scale, highpass_bandwidth, reconstruct
from .signals import GridSignal, Spectrum, random_spectrum

PRECISIONS = {"single": np.complex64, "double": np.complex128}
ABLATION_ROWS = ("S2-Conv", "SO3-Conv", "SO3+ReLU", "SO3+Shrinkage", "Pooling")


@dataclass(frozen=True)
class EquivarianceReport:
    """Summary of ``||P(rotate(f, R)) - rotate(P(f), R)||^2`` over a set of rotations."""

    label: str
    precision: str
    n_rotations: int
    max_error: float
    mean_error: float
    errors: tuple = field(default=(), repr=False)

    def as_dict(self):
        return {"label": self.label, "precision": self.precision, "rotations": self.n_rotations,
                "max_error": self.max_error, "mean_error": self.mean_error}


def precision_of(dtype):
    return "single" if np.dtype(dtype) == np.complex64 else "double"


def random_rotations(n, rng=None):
    """``n`` Haar-uniform rotations."""
    rng = np.random.default_rng(rng)
    return [Rotation.random(rng) for _ in range(n)]


def _flatten(value, output):
    if isinstance(value, NeedletCoefficients):
        bands = value.highpass_bands() if output == "highpass" else [b for _, b in value.bands()]
        if not bands:
            return np.zeros(0, dtype=complex)
        return np.concatenate([b.data.ravel() for b in bands])
    if isinstance(value, Spectrum):
        if output == "highpass":
            raise InvalidPipelineError("output='highpass' needs a pipeline returning NeedletCoefficients")
        return value.data.ravel()
    raise InvalidPipelineError(f"pipeline returned {type(value).__name__}, expected a spectrum")


def equivariance_error(pipeline, f, rotations, output="full", label="pipeline"):
    """Rotation-equivariance discrepancy of a spectral pipeline.

    Parameters
    ----------
    pipeline : callable
        Maps a :class:`Spectrum` to a :class:`Spectrum` or
        :class:`NeedletCoefficients`.
    f : Spectrum
        Input signal; its dtype sets the working precision.
    rotations : sequence of Rotation
    output : {"full", "highpass"}
        Compare every output coefficient or the high-pass bands only.
    label : str

    Returns
    -------
    EquivarianceReport
        Squared norms are accumulated in double precision.
    """
    if output not in ("full", "highpass"):
        raise ValueError("output must be 'full' or 'highpass'")
    rotations = list(rotations)
    if not rotations:
        raise ValueError("at least one rotation is required")
    base = pipeline(f)
    errors = []
    for R in rotations:
        lhs = _flatten(pipeline(rotate(f, R)), output)
        rhs = _flatten(rotate(base, R), output)
        if lhs.shape != rhs.shape:
            raise InvalidPipelineError(f"pipeline output shapes differ: {lhs.shape} vs {rhs.shape}")
        diff = lhs.astype(np.complex128) - rhs.astype(np.complex128)
        errors.append(float(np.sum(diff.real ** 2 + diff.imag ** 2)))
    return EquivarianceReport(label, precision_of(f.dtype), len(errors),
                              max(errors), float(np.mean(errors)), tuple(errors))


# ----------------------------------------------------------------------------
# Pipelines


def needlet_conv_pipeline(coarse_scale, triple, fine=None):
    """``f -> needlet_block_convolve(decompose(f, J0), triple)``."""
    def run(f):
        return needlet_block_convolve(decompose(f, coarse_scale, fine), triple)
    return run


def shrinkage_pipeline(coarse_scale, triple, config, fine=None):
    """Needlet convolution followed by high-pass shrinkage."""
    conv = needlet_conv_pipeline(coarse_scale, triple, fine)

    def run(f):
        return shrink(conv(f), config)
    return run


def relu_pipeline(coarse_scale, triple, fine=None):
    """Needlet convolution, reconstruction, then pointwise ReLU on the grid."""
    conv = needlet_conv_pipeline(coarse_scale, triple, fine)

    def run(f):
        return spatial_relu(reconstruct(conv(f)))
    return run


def _filters(manifold, bandwidth, rng, dtype):
    return FilterTriple.random(manifold, bandwidth, rng=rng, real=True, dtype=dtype)


def ablation_row(row, L, sigma=1e-3, precision="double", trials=10, rotations=10, seed=0,
                 coarse_scale=None):
    """One ablation cell: mean over trials of the max error over rotations.

    Every trial draws a real-valued random signal with ``(1+l)^-1`` decay,
    random real-valued block filters and ``rotations`` Haar rotations.  Needlet
    pipelines use ``J0 = max(J - 2, 1)`` unless ``coarse_scale`` is given.
    """
    if row not in ABLATION_ROWS:
        raise ValueError(f"row must be one of {ABLATION_ROWS}")
    dtype = PRECISIONS[precision]
    J = fine_scale(L)
    J0 = max(J - 2, 1) if coarse_scale is None else coarse_scale
    band_L = highpass_bandwidth(J - 1)
    manifold = "s2" if row == "S2-Conv" else "so3"
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(trials):
        f = random_spectrum(manifold, L, rng=rng, real=True, dtype=dtype)
        Rs = random_rotations(rotations, rng)
        if row == "Pooling":
            pipe, output = spectral_pool, "full"
        else:
            triple = _filters(manifold, band_L, rng, dtype)
            if row in ("S2-Conv", "SO3-Conv"):
                pipe, output = needlet_conv_pipeline(J0, triple), "full"
            elif row == "SO3+ReLU":
                pipe, output = relu_pipeline(J0, triple), "full"
            else:
                pipe, output = shrinkage_pipeline(J0, triple, ShrinkageConfig(sigma)), "highpass"
        values.append(equivariance_error(pipe, f, Rs, output, row).max_error)
    return float(np.mean(values))


def ablation_table(L=16, sigma=1e-3, trials=10, rotations=10, seed=0, rows=ABLATION_ROWS,
                   precisions=("single", "double")):
    """Equivariance errors for every (row, precision) pair.

    Returns a list of dicts with keys ``row``, ``single``, ``double``.
    """
    out = []
    for i, row in enumerate(rows):
        entry = {"row": row}
        for p in precisions:
            entry[p] = ablation_row(row, L, sigma, p, trials, rotations, seed + 1000 * i)
        out.append(entry)
    return out


def compression_rate(before, after):
    """Fraction of high-pass energy removed: ``1 - E_after / E_before``."""
    e0 = sum(b.energy() for b in before.highpass_bands())
    e1 = sum(b.energy() for b in after.highpass_bands())
    return 0.0 if e0 == 0 else 1.0 - e1 / e0


def sigma_sweep(f, sigmas, coarse_scale=None, triple=None, rotations=5, seed=0):
    """Equivariance error and compression rate of the shrinkage pipeline for each sigma.

    Parameters
    ----------
    f : Spectrum
    sigmas : sequence of float
        Positive noise levels.
    coarse_scale : int, optional
        Defaults to ``max(J - 2, 1)``.
    triple : FilterTriple, optional
        Defaults to random real-valued block filters drawn from ``seed``.
    rotations : int or sequence of Rotation

    Returns
    -------
    list of (sigma, error, compression)
    """
    rng = np.random.default_rng(seed)
    J = fine_scale(f.bandwidth)
    J0 = max(J - 2, 1) if coarse_scale is None else coarse_scale
    if triple is None:
        triple = _filters(f.manifold, highpass_bandwidth(J - 1), rng, f.dtype)
    Rs = random_rotations(rotations, rng) if isinstance(rotations, int) else list(rotations)
    conv = needlet_conv_pipeline(J0, triple)
    # the linear part is shared across sigma
    base = conv(f)
    rotated_in = [conv(rotate(f, R)) for R in Rs]
    rows = []
    for sigma in sigmas:
        sigma = float(sigma)
        if not sigma > 0:
            raise ValueError(f"sigma values must be positive, got {sigma}")
        cfg = ShrinkageConfig(sigma)
        shrunk = shrink(base, cfg)
        errs = []
        for R, c in zip(Rs, rotated_in):
            lhs = _flatten(shrink(c, cfg), "highpass")
            rhs = _flatten(rotate(shrunk, R), "highpass")
            d = lhs.astype(np.complex128) - rhs.astype(np.complex128)
            errs.append(float(np.sum(d.real ** 2 + d.imag ** 2)))
        rows.append((sigma, max(errs), compression_rate(base, shrunk)))
    return rows


def decay_curve(f, coarse_scales, sigma, triple=None, rotations=5, seed=0, n=None):
    """Shrinkage equivariance error as a function of the coarse scale ``J0``.

    The threshold is held fixed across ``J0``: ``N`` defaults to the high-pass
    count at the smallest ``J0`` requested.  Errors are measured on the
    high-pass bands.

    Returns
    -------
    list of (J0, error)
    """
    coarse_scales = [check_int(j, "J0", minimum=1) for j in coarse_scales]
    if coarse_scales != sorted(set(coarse_scales)):
        raise ValueError("coarse scales must be strictly increasing")
    J = fine_scale(f.bandwidth)
    if coarse_scales and coarse_scales[-1] >= J:
        raise ValueError(f"coarse scales must lie below J={J}")
    rng = np.random.default_rng(seed)
    if triple is None:
        triple = _filters(f.manifold, highpass_bandwidth(J - 1), rng, f.dtype)
    Rs = random_rotations(rotations, rng) if isinstance(rotations, int) else list(rotations)
    if n is None:
        n = max(highpass_count(decompose(f, coarse_scales[0])), 1) if coarse_scales else 1
    cfg = ShrinkageConfig(sigma, n)
    out = []
    for J0 in coarse_scales:
        pipe = shrinkage_pipeline(J0, triple, cfg)
        out.append((J0, equivariance_error(pipe, f, Rs, "highpass", f"J0={J0}").max_error))
    return out


# ----------------------------------------------------------------------------
# Test signals


def molecule_potential_signal(atoms, center, charge, rule, tol=1e-9):
    """Potential ``U_z(x) = sum_{j != i, z_j = z} z_i z / ||x - p_j||`` on the unit sphere around atom ``i``.

    Parameters
    ----------
    atoms : sequence of (charge, position)
        ``position`` is a length-3 vector.
    center : int
        Index ``i`` of the atom the sphere is centered on.
    charge : float
        Channel charge ``z``.
    rule : QuadratureRule
        S^2 rule supplying the sample directions.

    Returns
    -------
    GridSignal
        Real-valued samples.

    Raises
    ------
    DegenerateGeometryError
        If a contributing atom lies within ``tol`` of the sphere.
    """
    if rule.manifold != "s2":
        raise ValueError("potential signals live on S^2")
    charges = np.array([float(a[0]) for a in atoms])
    pos = np.array([np.asarray(a[1], float) for a in atoms]).reshape(len(atoms), 3)
    center = check_int(center, "center", minimum=0)
    if center >= len(atoms):
        raise ValueError(f"center index {center} out of range for {len(atoms)} atoms")
    x = pos[center] + sphere_to_cartesian(rule.points[:, 0], rule.points[:, 1])
    values = np.zeros(rule.n_points)
    for j in range(len(atoms)):
        if j == center or charges[j] != charge:
            continue
        if abs(np.linalg.norm(pos[j] - pos[center]) - 1.0) < tol:
            raise DegenerateGeometryError(f"atom {j} lies on the sphere around atom {center}")
        values += charges[center] * charge / np.linalg.norm(x - pos[j], axis=1)
    return GridSignal(rule, values[None, :].astype(complex))


def molecule_potential_spectrum(atoms, center, charges, rule):
    """Spectra of potential signals, one channel per charge in ``charges``."""
    samples = np.concatenate([molecule_potential_signal(atoms, center, z, rule).samples for z in charges])
    return analysis(GridSignal(rule, samples))
