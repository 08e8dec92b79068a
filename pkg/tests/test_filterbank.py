import numpy as np
import pytest
from hypothesis import given, strategies as st

from ndlt.filterbank import (FILTERS, GENERATORS, degree_response, filter_hat, generator_hat,
                             identity_residuals, nu, profile)

SUPPORTS = {"a": (0, 0.25), "b1": (0.125, 0.5), "b2": (0.25, 0.5),
            "alpha": (0, 0.5), "beta1": (0.25, 1.0), "beta2": (0.5, 1.0)}


def test_nu_values():
    assert nu(0.0) == 0.0
    assert nu(1.0) == 1.0
    assert abs(nu(0.5) - 0.5) < 1e-15
    assert nu(-3.0) == 0.0 and nu(7.0) == 1.0


def test_filter_examples():
    assert filter_hat("a", 0.1) == 1.0
    assert filter_hat("a", 0.25) == 0.0
    assert filter_hat("b1", 0.25) == 1.0
    for xi in (0.05, 0.15, 0.3, 0.45):
        s = filter_hat("a", xi) ** 2 + filter_hat("b1", xi) ** 2 + filter_hat("b2", xi) ** 2
        assert abs(s - 1) < 1e-15


def test_generator_examples():
    assert generator_hat("alpha", 0.2) == 1.0
    xi = np.linspace(0, 0.5, 10_000)
    alpha = generator_hat("alpha", xi)
    assert np.max(np.abs(generator_hat("alpha", 2 * xi) - filter_hat("a", xi) * alpha)) < 1e-15
    for n in (1, 2):
        res = generator_hat(f"beta{n}", 2 * xi) - filter_hat(f"b{n}", xi) * alpha
        assert np.max(np.abs(res)) < 1e-15


def test_beta2_closed_form():
    xi = np.linspace(0.5, 1.0, 101)
    np.testing.assert_allclose(generator_hat("beta2", xi), 0.5 * np.sin(np.pi * nu(2 * xi - 1)), atol=1e-15)


def test_unknown_kind():
    with pytest.raises(ValueError):
        filter_hat("c", 0.1)
    with pytest.raises(ValueError):
        generator_hat("gamma", 0.1)


@pytest.mark.parametrize("kind", FILTERS + GENERATORS)
def test_supports_and_range(kind):
    xi = np.linspace(-1.5, 1.5, 30_001)
    v = profile(kind, xi)
    lo, hi = SUPPORTS[kind]
    outside = (np.abs(xi) < lo) | (np.abs(xi) > hi)
    assert np.all(v[outside] == 0.0)
    assert np.all((v >= 0) & (v <= 1))
    np.testing.assert_array_equal(v, profile(kind, -xi))


BOUNDARIES = {"a": (0.125, 0.25), "b1": (0.125, 0.25), "b2": (0.25,),
              "alpha": (0.25, 0.5), "beta1": (0.25, 0.5, 1.0), "beta2": (0.5, 1.0)}


@pytest.mark.parametrize("kind", FILTERS + GENERATORS)
def test_continuity(kind):
    # filters live on |xi| <= 1/2; b2 jumps to its zero extension there
    for b in BOUNDARIES[kind]:
        left, right = profile(kind, np.nextafter(b, 0)), profile(kind, np.nextafter(b, 2))
        assert abs(left - right) < 1e-14


@given(st.floats(0, 0.5))
def test_partition_of_unity(xi):
    s = filter_hat("a", xi) ** 2 + filter_hat("b1", xi) ** 2 + filter_hat("b2", xi) ** 2
    assert abs(s - 1) < 1e-14


@given(st.floats(0, 4.0))
def test_two_scale_energy(xi):
    lhs = sum(generator_hat(k, 2 * xi) ** 2 for k in GENERATORS)
    assert abs(lhs - generator_hat("alpha", xi) ** 2) < 1e-14


@given(st.integers(1, 4), st.integers(0, 4), st.data())
def test_telescoping_tightness(J0, extra, data):
    J = J0 + extra
    xi = data.draw(st.floats(0, 2.0 ** (J - 1)))
    total = generator_hat("alpha", xi / 2 ** J0) ** 2
    for j in range(J0, J + 1):
        total += generator_hat("beta1", xi / 2 ** j) ** 2 + generator_hat("beta2", xi / 2 ** j) ** 2
    assert abs(total - 1) < 1e-13


def test_identity_residuals():
    res = identity_residuals(10_000)
    assert max(res.values()) < 1e-14


def test_degree_response():
    r = degree_response("a", 16, 5)
    np.testing.assert_array_equal(r, filter_hat("a", np.arange(17) / 32))
