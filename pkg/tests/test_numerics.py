import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exthl.errors import DomainError, IntegrationError, QuadratureError
from exthl.numerics import (
    OdeSpec,
    QuadratureSpec,
    WaveGrid,
    bessel_j0,
    bessel_j1,
    bessel_j1_prime,
    bessel_y0,
    bessel_y1,
    bessel_y1_prime,
    central_first,
    central_second,
    damped_semiinfinite_quadrature,
    dalembert_interior,
    gauss_kronrod_adaptive,
    hankel2_1,
    integrate_ode,
    richardson_to_zero,
)

X = np.geomspace(1e-3, 1e3, 50)


def _rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("fn,ref", [
    (bessel_j0, mpmath.besselj), (bessel_j1, mpmath.besselj),
    (bessel_y0, mpmath.bessely), (bessel_y1, mpmath.bessely),
])
def test_bessel_against_mpmath(fn, ref):
    order = 0 if fn in (bessel_j0, bessel_y0) else 1
    vals = fn(X)
    with mpmath.workdps(30):
        worst = max(_rel(v, float(ref(order, x))) for v, x in zip(vals, X))
    assert worst < 1e-10


def test_bessel_scalar_and_array_agree():
    assert isinstance(bessel_j1(2.0), float)
    assert bessel_j1(2.0) == bessel_j1(np.array([2.0]))[0]


def test_bessel_derivatives():
    x = np.array([0.3, 4.0, 30.0])
    with mpmath.workdps(30):
        jp = [float(mpmath.diff(lambda z: mpmath.besselj(1, z), v)) for v in x]
        yp = [float(mpmath.diff(lambda z: mpmath.bessely(1, z), v)) for v in x]
    np.testing.assert_allclose(bessel_j1_prime(x), jp, rtol=1e-10)
    np.testing.assert_allclose(bessel_y1_prime(x), yp, rtol=1e-10)


def test_hankel_is_j_minus_iy():
    x = np.array([0.1, 2.5, 40.0])
    np.testing.assert_allclose(hankel2_1(x), bessel_j1(x) - 1j * bessel_y1(x), rtol=1e-15)


def test_wronskian():
    w = bessel_j1(X) * bessel_y0(X) - bessel_j0(X) * bessel_y1(X)
    assert np.max(np.abs(w * math.pi * X / 2 - 1)) < 1e-9


def test_bessel_rejects_nonpositive():
    with pytest.raises(DomainError):
        bessel_y1(np.array([1.0, 0.0]))


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_bessel_hypothesis_mpmath(x):
    with mpmath.workdps(30):
        assert _rel(bessel_j0(x), float(mpmath.besselj(0, x))) < 1e-9 or abs(bessel_j0(x)) < 1e-8
        assert _rel(bessel_y1(x), float(mpmath.bessely(1, x))) < 1e-9 or abs(bessel_y1(x)) < 1e-8


def test_ode_exponential_decay():
    res = integrate_ode(lambda s, y: -y, [1.0], (0.0, 5.0), OdeSpec(rel_tol=1e-11, abs_tol=1e-14))
    assert abs(res.y[-1, 0] - math.exp(-5.0)) < 1e-11


def test_ode_harmonic_energy_and_dense():
    res = integrate_ode(lambda s, y: np.array([y[1], -y[0]]), [1.0, 0.0], (0.0, 200 * math.pi),
                        OdeSpec(rel_tol=1e-11, abs_tol=1e-14), dense=True)
    energy = res.y[:, 0] ** 2 + res.y[:, 1] ** 2
    assert np.max(np.abs(energy - 1)) < 1e-8
    s = np.linspace(0.0, 10.0, 37)
    np.testing.assert_allclose(res(s)[:, 0], np.cos(s), atol=1e-8)


def test_ode_errors():
    with pytest.raises(IntegrationError):
        integrate_ode(lambda s, y: y, [1.0], (1.0, 0.0))
    with pytest.raises(IntegrationError):
        integrate_ode(lambda s, y: -y, [1.0], (0.0, 10.0), OdeSpec(max_steps=2))
    with pytest.raises(IntegrationError):
        integrate_ode(lambda s, y: np.array([np.nan]), [1.0], (0.0, 1.0))


def test_gauss_kronrod_oscillatory():
    val, err, n = gauss_kronrod_adaptive(lambda x: np.exp(1j * 20 * x), 0.0, 3.0, rel_tol=1e-12)
    ref = (np.exp(60j) - 1) / 20j
    assert abs(val - ref) < 1e-12
    with pytest.raises(QuadratureError):
        gauss_kronrod_adaptive(lambda x: np.full_like(x, np.inf), 0.0, 1.0)


def test_richardson_removes_polynomial_terms():
    eps = [0.1, 0.05, 0.025, 0.0125]
    vals = [2.0 + 3 * e - 5 * e**2 + 7 * e**3 for e in eps]
    assert abs(richardson_to_zero(eps, vals) - 2.0) < 1e-12


def test_damped_quadrature_against_closed_form():
    # int_0^inf exp(i sigma) exp(-eps sigma) = 1/(eps - i)
    spec = QuadratureSpec(eps_reg=0.5, sigma_min=1e-14, sigma_max=200.0, rel_tol=1e-12)
    val = damped_semiinfinite_quadrature(lambda s: np.exp(1j * s), spec)
    assert abs(val - 1 / (0.5 - 1j)) < 1e-10
    with pytest.raises(QuadratureError):
        damped_semiinfinite_quadrature(lambda s: np.exp(1j * s), QuadratureSpec(eps_reg=0.01, sigma_max=10.0))


def test_stencils_second_order():
    errs = []
    for h in (0.1, 0.05):
        x = np.arange(0, 1 + h / 2, h)
        a = np.sin(x)
        errs.append(np.max(np.abs(central_second(a, 0, h) + np.sin(x[1:-1]))))
        assert np.max(np.abs(central_first(a, 0, h) - np.cos(x[1:-1]))) < h * h
    assert 3.8 < errs[0] / errs[1] < 4.2


def test_dalembert_of_quadratic_is_exact():
    g = WaveGrid.from_function("1+1", (0.1, 0.2), (0.0, 0.0), (6, 7), lambda t, x: t * t + 3 * x * x + 0j)
    # box = -d_t^2 + d_x^2 with c = 1
    np.testing.assert_allclose(dalembert_interior(g), 4.0, atol=1e-10)


def test_grid_validation():
    with pytest.raises(DomainError):
        WaveGrid("3+1-radial", (0.1, 0.1), (0.0, 0.0), np.zeros((3, 3)))
    with pytest.raises(DomainError):
        WaveGrid("bogus", (0.1,), (0.0,), np.zeros(3))
