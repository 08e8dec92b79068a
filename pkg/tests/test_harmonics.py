import numpy as np
import pytest
import scipy.linalg
import scipy.special
import sympy
from hypothesis import given, strategies as st
from scipy.spatial.transform import Rotation as SciRotation

from ndlt.convolution import rotate
from ndlt.harmonics import (Rotation, analysis, assoc_legendre, cartesian_to_sphere, evaluate,
                            sph_harm, sphere_to_cartesian, synthesis, wigner_d, wigner_D, wigner_D_all)
from ndlt.quadrature import make_rule, s2_rule, so3_rule
from ndlt.signals import GridSignal, Spectrum, block_offset, random_spectrum


def _angular_momentum(l):
    """J_y and J_z in the |l, m> basis, m = -l..l, from the ladder operators."""
    m = np.arange(-l, l + 1, dtype=float)
    jp = np.zeros((2 * l + 1, 2 * l + 1))
    for i in range(2 * l):
        jp[i + 1, i] = np.sqrt(l * (l + 1) - m[i] * (m[i] + 1))
    jy = (jp - jp.T) / 2j
    return jy, np.diag(m)


def _D_expm(l, a, b, g):
    jy, jz = _angular_momentum(l)
    return (scipy.linalg.expm(-1j * a * jz) @ scipy.linalg.expm(-1j * b * jy)
            @ scipy.linalg.expm(-1j * g * jz))


# ----------------------------------------------------------------------------
# Legendre and spherical harmonics


def test_assoc_legendre_trivial():
    t = np.linspace(-1, 1, 7)
    np.testing.assert_array_equal(assoc_legendre(0, 0, t), np.ones_like(t))
    assert assoc_legendre(2, 0, 0.0) == -0.5


def test_assoc_legendre_rodrigues_oracle():
    x = sympy.Symbol("x")
    l, m, t = 8, 5, sympy.Rational(3, 10)
    Pl = sympy.diff((x ** 2 - 1) ** l, x, l) / (2 ** l * sympy.factorial(l))
    Plm = (-1) ** m * (1 - x ** 2) ** sympy.Rational(m, 2) * sympy.diff(Pl, x, m)
    exact = float(Plm.subs(x, t).evalf(40))
    assert abs(assoc_legendre(8, 5, 0.3) - exact) < 1e-10


def test_assoc_legendre_rejects_m_above_l():
    with pytest.raises(ValueError):
        assoc_legendre(2, 3, 0.1)


@pytest.mark.parametrize("l,m", [(0, 0), (1, 1), (5, 3), (12, 7), (20, 20)])
def test_assoc_legendre_against_scipy(l, m):
    t = np.linspace(-0.95, 0.95, 11)
    np.testing.assert_allclose(assoc_legendre(l, m, t), scipy.special.lpmv(m, l, t), rtol=1e-11, atol=1e-12)


def test_sph_harm_examples():
    assert abs(sph_harm(0, 0, 0.3, 1.1) - 0.28209479177387814) < 1e-15
    b = np.linspace(0, np.pi, 9)
    np.testing.assert_allclose(sph_harm(1, 0, 0.7, b), np.sqrt(3 / (4 * np.pi)) * np.cos(b), atol=1e-15)
    r = s2_rule(6)
    y = sph_harm(3, 2, r.points[:, 0], r.points[:, 1])
    assert abs(np.sum(r.weights * np.abs(y) ** 2) - 1) < 1e-12


def test_sph_harm_rejects_large_m():
    with pytest.raises(ValueError):
        sph_harm(2, -3, 0.0, 0.0)


@given(st.integers(0, 30), st.data())
def test_sph_harm_against_scipy(l, data):
    m = data.draw(st.integers(-l, l))
    a = data.draw(st.floats(0, 2 * np.pi))
    b = data.draw(st.floats(0, np.pi))
    ref = scipy.special.sph_harm_y(l, m, b, a)
    assert abs(sph_harm(l, m, a, b) - ref) < 1e-12


def test_sph_harm_conjugation_symmetry():
    a, b = 0.4, 1.3
    for l in range(6):
        for m in range(-l, l + 1):
            assert abs(sph_harm(l, -m, a, b) - (-1) ** m * np.conj(sph_harm(l, m, a, b))) < 1e-15


# ----------------------------------------------------------------------------
# Wigner d / D


def test_wigner_d_examples():
    np.testing.assert_array_equal(wigner_d(1, 0.0), np.eye(3))
    for b in (0.1, 1.0, 2.5):
        assert abs(wigner_d(1, b)[1, 1] - np.cos(b)) < 1e-15


def test_wigner_d1_from_rotated_harmonics():
    # brute force from the action of a y-axis rotation on degree-1 harmonics
    b = 0.83
    R = Rotation(0.0, b, 0.0)
    pts = np.array([[0.3, 0.9], [1.7, 2.1], [4.0, 0.4]])
    xyz = sphere_to_cartesian(pts[:, 0], pts[:, 1])
    a2, b2 = cartesian_to_sphere(xyz @ R.matrix())      # rows R^-1 x
    lhs = np.array([[sph_harm(1, m, a2[k], b2[k]) for m in (-1, 0, 1)] for k in range(3)])
    Y = np.array([[sph_harm(1, m, pts[k, 0], pts[k, 1]) for m in (-1, 0, 1)] for k in range(3)])
    # Y_m(R^-1 x) = sum_n Y_n(x) D_{nm}(R)
    D = wigner_D(1, R)
    np.testing.assert_allclose(lhs, Y @ D, atol=1e-14)
    assert abs(wigner_d(1, b)[1, 1] - np.cos(b)) < 1e-15


@pytest.mark.parametrize("l", [0, 1, 2, 5, 13, 32, 64])
def test_wigner_d_against_expm(l):
    for b in (0.0, 0.3, 1.2, np.pi / 2, 2.9, np.pi):
        ref = _D_expm(l, 0.0, b, 0.0).real
        assert np.max(np.abs(wigner_d(l, b) - ref)) < 1e-13


@given(st.integers(0, 24), st.floats(0, np.pi))
def test_wigner_d_orthogonal(l, b):
    d = wigner_d(l, b)
    assert np.max(np.abs(d.T @ d - np.eye(2 * l + 1))) < 1e-12
    assert np.all(np.isfinite(d))


def test_wigner_d_finite_to_64():
    for d in wigner_D_all(64, Rotation(1.0, 2.0, 3.0)):
        assert np.all(np.isfinite(d))


@pytest.mark.parametrize("l", [0, 1, 3, 8])
def test_wigner_D_against_expm(l):
    rng = np.random.default_rng(l)
    for _ in range(3):
        R = Rotation.random(rng)
        ref = _D_expm(l, R.alpha, R.beta, R.gamma)
        assert np.max(np.abs(wigner_D(l, R) - ref)) < 1e-13


def test_wigner_D_trivial():
    np.testing.assert_allclose(wigner_D(0, Rotation(1, 2, 3)), [[1.0]])
    np.testing.assert_allclose(wigner_D(4, Rotation.identity()), np.eye(9), atol=1e-15)


def test_wigner_homomorphism(rng):
    for _ in range(5):
        R1, R2 = Rotation.random(rng), Rotation.random(rng)
        R12 = R1 @ R2
        for l in range(9):
            err = np.linalg.norm(wigner_D(l, R1) @ wigner_D(l, R2) - wigner_D(l, R12))
            assert err < 1e-11


def test_rotation_matrix_matches_scipy(rng):
    for _ in range(10):
        R = Rotation.random(rng)
        ref = SciRotation.from_euler("ZYZ", [R.alpha, R.beta, R.gamma]).as_matrix()
        np.testing.assert_allclose(R.matrix(), ref, atol=1e-14)
        back = Rotation.from_matrix(R.matrix())
        np.testing.assert_allclose(back.matrix(), R.matrix(), atol=1e-13)


def test_rotation_gimbal_lock():
    for b in (0.0, np.pi):
        R = Rotation(0.7, b, 1.1)
        np.testing.assert_allclose(Rotation.from_matrix(R.matrix()).matrix(), R.matrix(), atol=1e-14)


def test_rotation_range_checks():
    with pytest.raises(ValueError):
        Rotation(0.0, 4.0, 0.0)
    R = Rotation(-0.5, 1.0, 7.0)
    assert 0 <= R.alpha < 2 * np.pi and 0 <= R.gamma < 2 * np.pi


# ----------------------------------------------------------------------------
# Transforms


def test_s2_analysis_examples():
    r = s2_rule(5)
    samples = sph_harm(2, 1, r.points[:, 0], r.points[:, 1])
    spec = analysis(GridSignal(r, samples))
    expected = np.zeros(36, complex)
    expected[4 + 2 + 1] = 1
    assert np.max(np.abs(spec.data[0] - expected)) < 1e-12
    const = analysis(GridSignal(r, np.full(r.n_points, 2.5)))
    assert abs(const.data[0, 0] - 2.5 * np.sqrt(4 * np.pi)) < 1e-12
    assert np.max(np.abs(const.data[0, 1:])) < 1e-12


def test_so3_analysis_examples():
    L = 3
    r = so3_rule(L)
    # orthonormalized D^2_{1,-1}
    vals = np.array([wigner_D(2, Rotation(*p))[3, 1] for p in r.points]) * np.sqrt(5 / (8 * np.pi ** 2))
    spec = analysis(GridSignal(r, vals))
    mags = np.abs(spec.data[0])
    k = int(np.argmax(mags))
    assert abs(mags[k] - 1) < 1e-12
    assert np.sum(mags > 1e-12) == 1
    # conj(D_{1,-1}) = D_{-1,1} up to sign, so the coefficient sits at (m, n) = (-1, 1)
    assert k == block_offset("so3", 2) + (2 - 1) * 5 + (2 + 1)
    const = analysis(GridSignal(r, np.full(r.n_points, -1.5)))
    assert abs(const.data[0, 0] + 1.5 * np.sqrt(8 * np.pi ** 2)) < 1e-12
    assert np.max(np.abs(const.data[0, 1:])) < 1e-12


@pytest.mark.parametrize("manifold,L,tol", [("s2", 32, 1e-11), ("so3", 16, 1e-10)])
def test_round_trip(manifold, L, tol, rng):
    f = random_spectrum(manifold, L, channels=2, rng=rng)
    back = analysis(synthesis(f))
    assert np.linalg.norm(back.data - f.data) / np.linalg.norm(f.data) < tol


@given(st.sampled_from(["s2", "so3"]), st.integers(1, 9), st.integers(0, 3), st.integers(0, 2 ** 31))
def test_round_trip_property(manifold, L, extra, seed):
    f = random_spectrum(manifold, L, rng=seed)
    rule = make_rule(manifold, L + extra)
    back = analysis(synthesis(f, rule), L)
    assert np.linalg.norm(back.data - f.data) / np.linalg.norm(f.data) < 1e-12


@pytest.mark.parametrize("manifold,L", [("s2", 12), ("so3", 6)])
def test_parseval(manifold, L, rng):
    f = random_spectrum(manifold, L, rng=rng)
    g = synthesis(f)
    lhs = np.sum(g.rule.weights * np.abs(g.samples[0]) ** 2)
    assert abs(lhs - f.energy()) / f.energy() < 1e-10


def test_synthesis_matches_pointwise_evaluation(rng):
    for manifold, L in (("s2", 7), ("so3", 4)):
        f = random_spectrum(manifold, L, rng=rng)
        g = synthesis(f)
        idx = rng.choice(g.rule.n_points, 20, replace=False)
        np.testing.assert_allclose(evaluate(f, g.rule.points[idx])[0], g.samples[0, idx], atol=1e-12)


def test_single_precision_transform(rng):
    f = random_spectrum("s2", 16, rng=rng, dtype=np.complex64)
    g = synthesis(f)
    assert g.samples.dtype == np.complex64
    back = analysis(g)
    assert back.dtype == np.complex64
    assert np.linalg.norm(back.data - f.data) / np.linalg.norm(f.data) < 1e-5


def test_rule_mismatch_raises(rng):
    f = random_spectrum("s2", 8, rng=rng)
    with pytest.raises(ValueError):
        synthesis(f, so3_rule(8))
    with pytest.raises(ValueError):
        synthesis(f, s2_rule(4))


def test_rotate_then_analyze_s2(rng):
    L = 8
    f = random_spectrum("s2", L, rng=rng)
    R = Rotation.random(rng)
    r = s2_rule(L)
    xyz = sphere_to_cartesian(r.points[:, 0], r.points[:, 1])
    a, b = cartesian_to_sphere(xyz @ R.matrix())        # R^-1 x
    rotated_samples = evaluate(f, np.stack([a, b], axis=1))
    direct = analysis(GridSignal(r, rotated_samples))
    assert np.max(np.abs(direct.data - rotate(f, R).data)) < 1e-10


def test_rotate_then_analyze_so3(rng):
    L = 4
    f = random_spectrum("so3", L, rng=rng)
    R = Rotation.random(rng)
    r = so3_rule(L)
    Rinv = R.matrix().T
    pts = []
    for p in r.points:
        q = Rotation.from_matrix(Rinv @ Rotation(*p).matrix())
        pts.append((q.alpha, q.beta, q.gamma))
    direct = analysis(GridSignal(r, evaluate(f, np.array(pts))))
    assert np.max(np.abs(direct.data - rotate(f, R).data)) < 1e-10


def test_spectrum_layout_and_validation():
    s = Spectrum.zeros("so3", 2, channels=3)
    assert s.data.shape == (3, 1 + 9 + 25)
    assert s.block(2).shape == (3, 5, 5)
    with pytest.raises(ValueError):
        Spectrum("s2", 2, np.zeros((1, 8)))
    with pytest.raises(IndexError):
        s.block(3)
