import math

import mpmath
import numpy as np
import pytest

from exthl import minkowski as mk
from exthl.errors import DomainError, UnsupportedSeparationError
from exthl.fields import FieldConfig
from exthl.numerics import WaveGrid
from exthl.propagator import (
    KERNEL_COLUMNS,
    PacketSpec,
    SpacetimeSeparation,
    compose_slices,
    gaussian_packet_source,
    hankel_sigma_integral,
    kernel_closed_form,
    kernel_free,
    kernel_grid,
    kernel_sigma_free,
    kernel_sigma_slice,
    kg_charge_radial,
    kg_residual,
    lattice_kernel,
    norm_from_charges,
    off_shell_mismatch,
    plane_wave_grid,
    propagate_wavepacket,
    read_grid,
    short_time_step,
    write_grid,
    write_kernel_csv,
)

ORIGIN = (0.0, 0.0, 0.0)


def test_separation_classification():
    assert SpacetimeSeparation((0.5, 0, 0), 1.0).classification == "timelike"
    assert SpacetimeSeparation((1.0, 0, 0), 1.0).classification == "lightlike"
    sp = SpacetimeSeparation((2.0, 0, 0), 1.0)
    assert sp.classification == "spacelike"
    with pytest.raises(UnsupportedSeparationError):
        sp.tau
    sep = SpacetimeSeparation.between((1.0, (0, 0, 0)), (3.0, (0.6, 0.8, 0)), c=1.0)
    assert sep.tau == pytest.approx(math.sqrt(3.0))


@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0, 5.0, 10.0])
def test_closed_form_against_mpmath(params, tau):
    with mpmath.workdps(30):
        h = complex(mpmath.hankel2(1, tau))
    ref = h / (4 * math.pi * tau)
    assert abs(complex(kernel_closed_form(params, tau)) - ref) / abs(ref) < 1e-12
    assert complex(kernel_closed_form(params, tau, N=2.0)) == pytest.approx(ref / 2, rel=1e-12)


def test_closed_form_rejects_nonpositive(params):
    with pytest.raises(UnsupportedSeparationError):
        kernel_closed_form(params, [1.0, 0.0])


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 5.0, 10.0])
def test_sigma_quadrature_matches_closed_form(params, x):
    rep = kernel_free(params, SpacetimeSeparation(ORIGIN, x))
    assert rep.discrepancy < 1e-5
    assert rep.to_row()[0] == pytest.approx(x)
    # the raw damped values approach the limit from one side
    assert len(rep.damped_values) == len(rep.damping)


def test_hankel_sigma_integral_identity():
    J, _ = hankel_sigma_integral(3.0)
    with mpmath.workdps(30):
        ref = -math.pi * complex(mpmath.hankel2(1, 3.0))
    assert abs(J - ref) / abs(ref) < 1e-8


def test_kernel_free_rejects_spacelike(params):
    with pytest.raises(UnsupportedSeparationError):
        kernel_free(params, SpacetimeSeparation((2.0, 0, 0), 1.0))


def test_kernel_depends_only_on_tau(params):
    b = mk.BoostParams([0.3, -0.5, 0.2])
    q, t = np.array([0.2, 0.1, -0.3]), 1.7
    Q, T = mk.boost_coordinates(q, t, b)
    k1 = kernel_closed_form(params, SpacetimeSeparation(q, t).tau)
    k2 = kernel_closed_form(params, SpacetimeSeparation(Q, T).tau)
    assert abs(k1 - k2) / abs(k1) < 1e-12


def test_slice_product_is_sigma_kernel(params):
    dq, dt, sigma = np.array([0.3, -0.4, 0.1]), 1.3, 0.8
    prod = params.c * kernel_sigma_slice(params, 0.0, dt, sigma, timelike=True)
    for x in dq:
        prod *= kernel_sigma_slice(params, 0.0, x, sigma)
    prod *= np.exp(-0.5j * sigma)
    ref = kernel_sigma_free(params, SpacetimeSeparation(dq, dt), sigma).amplitude
    assert abs(prod - ref) / abs(ref) < 1e-13


def test_slice_kernel_reduces_to_gaussian_heat_kernel():
    # analytic continuation check: |K| = sqrt(m/(2 pi hbar sigma))
    from exthl.dynamics import ParticleParams
    p = ParticleParams(m=2.0, hbar=0.5)
    k = kernel_sigma_slice(p, 0.1, 0.9, 0.7)
    assert abs(k) == pytest.approx(math.sqrt(2.0 / (2 * math.pi * 0.5 * 0.7)))
    with pytest.raises(DomainError):
        kernel_sigma_slice(p, 0.0, 1.0, 0.0)


def test_semigroup(params):
    val, raw = compose_slices(params, 0.1, 0.7, 0.6, 0.9)
    ref = kernel_sigma_slice(params, 0.1, 0.7, 1.5)
    assert abs(val - ref) / abs(ref) < 1e-4
    # extrapolation improves on the least damped raw value
    assert abs(val - ref) < abs(raw[-1] - ref)


@pytest.mark.slow
def test_lattice_chain(params):
    val, _ = lattice_kernel(params, 0.1, 0.7, [0.6, 0.9, 1.0])
    ref = kernel_sigma_slice(params, 0.1, 0.7, 2.5)
    assert abs(val - ref) / abs(ref) < 1e-4


def test_kg_kernel_convergence(params):
    res = [kg_residual(kernel_grid(params, (2.0, 3.0), (0.5, 1.5), h), params, event=(0.0, ORIGIN)).max_abs
           for h in (0.04, 0.02, 0.01)]
    for a, b in zip(res, res[1:]):
        assert 3.6 <= a / b <= 4.4


def test_kernel_grid_validation(params):
    with pytest.raises(DomainError):
        kernel_grid(params, (2.0, 3.0), (0.5, 1.5), 0.03)
    with pytest.raises(DomainError):
        kernel_grid(params, (0.5, 1.0), (0.5, 1.5), 0.1)


def test_plane_wave_residual(params):
    k = 0.7
    om = math.sqrt(1 + k * k)
    errs = [kg_residual(plane_wave_grid("1+1", [k], om, (h, h), (5, 5)), params).max_abs for h in (0.02, 0.01)]
    assert 3.8 < errs[0] / errs[1] < 4.2
    g = plane_wave_grid("3+1", [0.3, 0.2, -0.4], math.sqrt(1 + 0.29), (0.01,) * 4, (3, 3, 3, 3))
    assert kg_residual(g, params).max_abs < 1e-4
    off = plane_wave_grid("1+1", [k], 1.6, (0.01, 0.01), (3, 3))
    assert kg_residual(off, params).max_abs == pytest.approx(abs(off_shell_mismatch(params, [k], 1.6)), rel=1e-3)


def test_gauge_field_residual_vanishes_for_volkov_like_solution(params):
    # constant vector potential: psi = exp(i (p - A) x - i omega t) is on shell with kinetic momentum p - A
    f = FieldConfig.uniform_electric((0.0, 0.0, 0.0))
    g = plane_wave_grid("3+1", [0.3, 0.0, 0.0], math.sqrt(1.09), (0.01,) * 4, (3, 3, 3, 3))
    assert kg_residual(g, params, f).max_abs < 1e-4


def test_short_time_step_orders(params):
    k, om = 0.7, 1.6
    delta = off_shell_mismatch(params, [k], om)
    errs = []
    for eps in (0.02, 0.01, 0.005):
        g = plane_wave_grid("1+1", [k], om, (1e-3, 1e-3), (3, 3))
        out = short_time_step(g, params, eps)
        errs.append(abs(out.psi[1, 1] / g.psi[1, 1] - (1 - 1j * eps * delta / 2)))
        assert out.boundary_flag[0, 0] and not out.boundary_flag[1, 1]
        assert out.psi[0, 0] == g.psi[0, 0]
    assert math.log2(errs[0] / errs[1]) > 1.9
    with pytest.raises(DomainError):
        short_time_step(g, params, -0.1)


def test_radial_layout_rejects_fields(params):
    g = kernel_grid(params, (2.0, 2.2), (0.5, 0.7), 0.1)
    with pytest.raises(DomainError):
        kg_residual(g, params, FieldConfig.uniform_magnetic((0, 0, 1.0)))


def test_radial_and_cartesian_propagation_agree(params):
    # one time slice of a spherical Gaussian blob, sampled on both layouts
    h = 0.5
    xs = np.arange(-4.0, 4.01, h)
    cart = WaveGrid.from_function(
        "3+1", (h, h, h, h), (0.0, xs[0], xs[0], xs[0]), (1, xs.size, xs.size, xs.size),
        lambda t, x, y, z: np.exp(-(x * x + y * y + z * z)) + 0j,
    )
    hr = 0.02
    rad = WaveGrid.from_function("3+1-radial", (h, hr), (0.0, hr), (1, 250), lambda t, r: np.exp(-r * r) + 0j)
    targets = np.array([[20.0, 0.0, 0.0, 0.0], [20.0, 1.0, 2.0, -0.5]])
    a = propagate_wavepacket(cart, targets, params)
    b = propagate_wavepacket(rad, targets, params)
    np.testing.assert_allclose(a, b, rtol=1e-6)
    # kernel nearly constant over the blob: K(20) pi^(3/2) times the time cell
    ref = complex(kernel_closed_form(params, 20.0)) * math.pi**1.5 * h
    assert abs(a[0] - ref) / abs(ref) < 0.1


def test_propagation_rejects_spacelike_targets(params):
    src = gaussian_packet_source(PacketSpec(n_r=10, n_t=3), params)
    with pytest.raises(UnsupportedSeparationError):
        propagate_wavepacket(src, [[5.0, 0, 0, 0]], params)
    with pytest.raises(DomainError):
        propagate_wavepacket(plane_wave_grid("1+1", [0.1], 1.0, (0.1, 0.1), (3, 3)), [[5.0, 0, 0, 0]], params)


def test_charge_of_positive_frequency_packet(params):
    r = np.linspace(0, 40, 801)
    psi = np.exp(-0.5 * (r / 5) ** 2)
    q = kg_charge_radial(r, psi, -1j * psi, params)
    # omega = m c^2 / hbar: density |psi|^2 = exp(-r^2/w^2), integral pi^(3/2) w^3
    assert q == pytest.approx(math.pi**1.5 * 125, rel=1e-8)


def test_norm_from_charges():
    cal = norm_from_charges(2.0, [0.5, 0.5])
    assert cal.N == pytest.approx(0.5)
    assert cal.fit_residual == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        norm_from_charges(2.0, [-0.5, -0.5])


def test_grid_io_roundtrip(tmp_path, params):
    g = kernel_grid(params, (2.0, 2.4), (0.5, 0.9), 0.1)
    path = write_grid(g, tmp_path / "k.bin")
    back = read_grid(path)
    assert back.layout == g.layout
    assert back.spacings == g.spacings and back.offsets == g.offsets
    np.testing.assert_array_equal(back.psi, g.psi)


def test_kernel_csv(tmp_path, params):
    rows = [kernel_free(params, SpacetimeSeparation(ORIGIN, t)) for t in (1.0, 2.0)]
    path = write_kernel_csv(rows, tmp_path / "k.csv")
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == list(KERNEL_COLUMNS)
    assert float(lines[1].split(",")[1]) == rows[0].closed_form.amplitude.real
