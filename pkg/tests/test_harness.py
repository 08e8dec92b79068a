import numpy as np
import pytest

from ndlt.convolution import FilterTriple, rotate
from ndlt.exceptions import DegenerateGeometryError, InvalidPipelineError
from ndlt.harmonics import Rotation, analysis, sphere_to_cartesian
from ndlt.harness import (ablation_row, compression_rate, decay_curve, equivariance_error,
                          molecule_potential_signal, molecule_potential_spectrum, needlet_conv_pipeline,
                          random_rotations, relu_pipeline, shrinkage_pipeline, sigma_sweep)
from ndlt.layers import ShrinkageConfig, shrink, spectral_pool
from ndlt.needlet import decompose, fine_scale
from ndlt.quadrature import make_rule
from ndlt.signals import Spectrum, random_spectrum


def test_identity_pipeline_is_exact(rng):
    f = random_spectrum("so3", 6, rng=rng)
    rep = equivariance_error(lambda s: s, f, random_rotations(3, rng))
    assert rep.max_error == 0.0 and rep.mean_error == 0.0
    assert rep.n_rotations == 3 and rep.precision == "double"
    assert rep.as_dict()["max_error"] == 0.0


def test_needlet_conv_pipeline_double(rng):
    f = random_spectrum("so3", 16, rng=rng, real=True)
    triple = FilterTriple.random("so3", 16, rng=rng, real=True)
    rep = equivariance_error(needlet_conv_pipeline(3, triple), f, random_rotations(5, rng))
    assert rep.max_error < 1e-12


def test_shrinkage_pipeline_order(rng):
    # error scale for sigma = 1e-3 sits within a factor of 100 of 5e-7
    vals = []
    for _ in range(3):
        f = random_spectrum("so3", 16, rng=rng, real=True)
        triple = FilterTriple.random("so3", 16, rng=rng, real=True)
        pipe = shrinkage_pipeline(3, triple, ShrinkageConfig(1e-3))
        vals.append(equivariance_error(pipe, f, random_rotations(5, rng), "highpass").max_error)
    assert 5e-9 <= np.mean(vals) <= 5e-5


@pytest.mark.parametrize("manifold", ["s2", "so3"])
def test_linear_pipelines_bounded(manifold, rng):
    f = random_spectrum(manifold, 32 if manifold == "s2" else 12, rng=rng)
    rep = equivariance_error(spectral_pool, f, random_rotations(4, rng))
    assert rep.max_error == 0.0


def test_invalid_pipeline(rng):
    f = random_spectrum("s2", 4, rng=rng)
    Rs = random_rotations(2, rng)
    with pytest.raises(InvalidPipelineError):
        equivariance_error(lambda s: s.data, f, Rs)
    with pytest.raises(InvalidPipelineError):
        equivariance_error(lambda s: s, f, Rs, output="highpass")
    with pytest.raises(ValueError):
        equivariance_error(lambda s: s, f, [])
    with pytest.raises(ValueError):
        equivariance_error(lambda s: s, f, Rs, output="lowpass")


def test_ablation_pooling_zero():
    assert ablation_row("Pooling", 16, trials=2, rotations=3) == 0.0
    assert ablation_row("Pooling", 16, precision="single", trials=2, rotations=3) == 0.0
    with pytest.raises(ValueError):
        ablation_row("Dropout", 16)


def test_ablation_conv_rows_small():
    assert ablation_row("S2-Conv", 8, trials=2, rotations=3) < 1e-12
    assert ablation_row("SO3-Conv", 8, trials=2, rotations=3, precision="single") < 1e-5


def test_compression_rate(rng):
    c = decompose(random_spectrum("s2", 16, rng=rng), 1)
    assert compression_rate(c, c) == 0.0
    assert compression_rate(c, shrink(c, 1e9)) == 1.0
    z = decompose(Spectrum.zeros("s2", 4), 1)
    assert compression_rate(z, z) == 0.0


def test_sigma_sweep_monotone(rng):
    f = random_spectrum("so3", 16, rng=rng, real=True)
    rows = sigma_sweep(f, np.logspace(-7, 0, 8), rotations=3, seed=1)
    errs = [e for _, e, _ in rows]
    comps = [c for _, _, c in rows]
    assert all(b >= a - 1e-15 for a, b in zip(errs, errs[1:]))
    assert all(b >= a - 1e-15 for a, b in zip(comps, comps[1:]))
    assert errs[0] < 1e-12
    with pytest.raises(ValueError):
        sigma_sweep(f, [0.0])


def test_sigma_sweep_matches_pipeline(rng):
    f = random_spectrum("s2", 16, rng=rng, real=True)
    triple = FilterTriple.random("s2", 16, rng=rng, real=True)
    Rs = random_rotations(3, rng)
    (_, err, _), = sigma_sweep(f, [0.05], coarse_scale=2, triple=triple, rotations=Rs)
    pipe = shrinkage_pipeline(2, triple, ShrinkageConfig(0.05))
    ref = equivariance_error(pipe, f, Rs, "highpass").max_error
    assert err == pytest.approx(ref, rel=1e-12)


def test_decay_non_increasing(rng):
    f = random_spectrum("s2", 32, rng=rng, real=True, decay=2.0)
    J = fine_scale(32)
    rows = decay_curve(f, range(1, J), 1e-2, rotations=3, seed=2)
    errs = [e for _, e in rows]
    assert all(b <= a * (1 + 1e-12) + 1e-30 for a, b in zip(errs, errs[1:]))


def test_decay_zero_without_highpass(rng):
    # degrees <= 2^(J0-2) are untouched by every high-pass filter from scale J0 on
    f = random_spectrum("s2", 32, rng=rng).truncate(2).truncate(32)
    rows = decay_curve(f, [3, 4, 5], 0.1, rotations=3)
    assert [e for _, e in rows] == [0.0, 0.0, 0.0]


def test_decay_slope_for_smooth_signal():
    # heavily thresholded regime: log2 error falls at least one unit per scale
    f = random_spectrum("s2", 64, rng=7, real=True, decay=2.0)
    rows = decay_curve(f, range(1, fine_scale(64)), 1.0, rotations=3, seed=3)
    J0 = np.array([j for j, e in rows if e > 0], float)
    err = np.array([e for _, e in rows if e > 0])
    slope = np.polyfit(J0, np.log2(err), 1)[0]
    assert slope <= -1.0


def test_decay_validation(rng):
    f = random_spectrum("s2", 16, rng=rng)
    with pytest.raises(ValueError):
        decay_curve(f, [3, 2], 0.1)
    with pytest.raises(ValueError):
        decay_curve(f, [1, 5], 0.1)


ATOMS = [(6.0, (0.0, 0.0, 0.0)), (1.0, (0.0, 0.0, 2.5)), (1.0, (3.0, 0.0, 0.0)), (8.0, (0.0, -4.0, 0.0))]


def test_molecule_no_matching_charge():
    rule = make_rule("s2", 8)
    g = molecule_potential_signal(ATOMS, 0, 7.0, rule)
    assert np.all(g.samples == 0)


def test_molecule_direct_values():
    rule = make_rule("s2", 8)
    g = molecule_potential_signal(ATOMS, 0, 1.0, rule)
    x = sphere_to_cartesian(rule.points[:, 0], rule.points[:, 1])
    expected = 6.0 / np.linalg.norm(x - [0, 0, 2.5], axis=1) + 6.0 / np.linalg.norm(x - [3, 0, 0], axis=1)
    np.testing.assert_allclose(g.samples[0].real, expected, rtol=1e-14)
    assert np.all(g.samples.imag == 0)


def test_molecule_max_near_atom():
    rule = make_rule("s2", 16)
    atoms = [(1.0, (0.0, 0.0, 0.0)), (2.0, (1.2, 1.5, -0.7))]
    g = molecule_potential_signal(atoms, 0, 2.0, rule)
    x = sphere_to_cartesian(rule.points[:, 0], rule.points[:, 1])
    d = np.array([1.2, 1.5, -0.7]) / np.linalg.norm([1.2, 1.5, -0.7])
    assert np.argmax(g.samples[0].real) == np.argmax(x @ d)


def test_molecule_rotation_oracle():
    rule = make_rule("s2", 48)
    R = Rotation(0.4, 1.1, 2.3)
    atoms = [(1.0, (0.0, 0.0, 0.0)), (1.0, (0.0, 3.0, 4.0)), (1.0, (-6.0, 1.0, 0.0))]
    moved = [(z, R.matrix() @ np.array(p)) for z, p in atoms]
    a = analysis(molecule_potential_signal(atoms, 0, 1.0, rule))
    b = analysis(molecule_potential_signal(moved, 0, 1.0, rule))
    assert np.max(np.abs(rotate(a, R).data - b.data)) < 1e-8


def test_molecule_degenerate_geometry():
    rule = make_rule("s2", 4)
    atoms = [(1.0, (0.0, 0.0, 0.0)), (1.0, (0.0, 0.6, 0.8))]
    with pytest.raises(DegenerateGeometryError):
        molecule_potential_signal(atoms, 0, 1.0, rule)
    with pytest.raises(ValueError):
        molecule_potential_signal(atoms, 5, 1.0, rule)
    with pytest.raises(ValueError):
        molecule_potential_signal(atoms, 0, 1.0, make_rule("so3", 2))


def test_molecule_spectrum_channels_deterministic():
    rule = make_rule("s2", 8)
    a = molecule_potential_spectrum(ATOMS, 0, [1.0, 8.0], rule)
    b = molecule_potential_spectrum(ATOMS, 0, [1.0, 8.0], rule)
    assert a.channels == 2
    assert a.data.tobytes() == b.data.tobytes()


def test_relu_pipeline_equivariant_only_on_grid_rotations():
    # z-rotations by a multiple of the longitude spacing permute the grid
    f = random_spectrum("so3", 16, rng=1, real=True)
    triple = FilterTriple.random("so3", 16, rng=2, real=True)
    pipe = relu_pipeline(3, triple)
    on_grid = [Rotation(2 * np.pi * k / 33, 0.0, 0.0) for k in (1, 5)]
    assert equivariance_error(pipe, f, on_grid).max_error < 1e-25
    assert equivariance_error(pipe, f, [Rotation(0.3, 0.0, 0.0)]).max_error > 1e-6
