"""The thirteen acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""
import math
import time

import mpmath
import numpy as np

from exthl import cli
from exthl import minkowski as mk
from exthl.dynamics import (
    ExtendedPhasePoint,
    ExtendedVelocity,
    ParticleParams,
    extended_hamiltonian_em,
    free_particle_hj_action,
    gamma_identity_residual,
    hessian_determinant,
    hj_residual,
)
from exthl.fields import FieldConfig
from exthl.numerics import bessel_j0, bessel_j1, bessel_y0, bessel_y1
from exthl.propagator import (
    SpacetimeSeparation,
    compose_slices,
    kernel_free,
    kernel_grid,
    kernel_sigma_slice,
    kg_residual,
    off_shell_mismatch,
    plane_wave_grid,
    short_time_step,
)
from exthl.verify import cyclotron_frequency_error, equivalence_error, observed_orders, scenario_trajectories

RNG = np.random.default_rng(20240601)


def _random_boost(rng, max_speed=0.9):
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return mk.BoostParams(d * max_speed * rng.uniform() ** (1 / 3))


def test_c01_constraint_conservation(acceptance):
    t0 = time.perf_counter()
    trajs = scenario_trajectories(100.0)
    elapsed = time.perf_counter() - t0
    worst = {name: rec.max_constraint_residual() for name, (_, rec) in trajs.items()}
    ok = max(worst.values()) < 1e-9 and elapsed < 5.0
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    acceptance(1, "constraint conservation", ok, f"{detail} (< 1e-9), {elapsed:.2f} s (< 5 s)")


def test_c02_extended_conventional_equivalence(acceptance):
    t0 = time.perf_counter()
    errs = {name: equivalence_error(sc, rec) for name, (sc, rec) in scenario_trajectories(100.0).items()}
    elapsed = time.perf_counter() - t0
    ok = max(errs.values()) < 1e-6 and elapsed < 5.0
    detail = ", ".join(f"{k} {v:.2e}" for k, v in errs.items())
    acceptance(2, "extended/conventional equivalence", ok, f"{detail} (< 1e-6), {elapsed:.2f} s (< 5 s)")


def test_c03_analytic_oracles(acceptance):
    trajs = scenario_trajectories(100.0, dense=True)
    sc, rec = trajs["uniform-B"]
    freq = cyclotron_frequency_error(sc, rec)
    sc, rec = trajs["uniform-E"]
    p = sc.params
    a = p.zeta * float(sc.field.params["E"][0]) / p.m
    c = p.c
    x = (c * c / a) * (np.cosh(a * rec.s / c) - 1.0)
    hyp = float(np.max(np.abs(rec.q[:, 0] - x)) / np.max(np.abs(x)))
    ok = freq < 1e-6 and hyp < 1e-8
    acceptance(3, "analytic oracles", ok, f"cyclotron frequency {freq:.2e} (< 1e-6), hyperbolic x {hyp:.2e} (< 1e-8)")


def test_c04_gamma_identity(acceptance):
    worst = {name: gamma_identity_residual(rec) for name, (_, rec) in scenario_trajectories(100.0).items()}
    ok = max(worst.values()) < 1e-9
    acceptance(4, "gamma identity", ok, ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + " (< 1e-9)")


def test_c05_lorentz_invariance(acceptance):
    p = ParticleParams()
    h1 = shell = 0.0
    for _ in range(100):
        b = _random_boost(RNG)
        k = RNG.uniform(-1, 1, 3)
        e = math.sqrt(float(k @ k) + 1.0) * RNG.uniform(0.9, 1.1)
        P, E = mk.boost_momentum_energy(k, e, b, inverse=True)
        before = extended_hamiltonian_em(p, ExtendedPhasePoint(0.0, 0.0, e, (0, 0, 0), k))
        after = extended_hamiltonian_em(p, ExtendedPhasePoint(0.0, 0.0, E, (0, 0, 0), P))
        h1 = max(h1, abs(before - after))
        sa = mk.minkowski_dot(np.append(e, k), np.append(e, k)) + 1.0
        sb = mk.minkowski_dot(np.append(E, P), np.append(E, P)) + 1.0
        shell = max(shell, abs(sa - sb))
    grad = 0.0
    for _ in range(20):
        b = _random_boost(RNG)
        q, t, P = RNG.uniform(-1, 1, 3), RNG.uniform(-1, 1), RNG.uniform(-1, 1, 3)
        E = math.sqrt(float(P @ P) + 1.0)
        g = mk.boost_generating_gradients(q, P, t, E, b)
        pr, er = mk.boost_momentum_energy(P, E, b)
        Qr, Tr = mk.boost_coordinates(q, t, b)
        grad = max(grad, float(np.max(np.abs(g["p_k"] - pr))), abs(g["e_k"] - er),
                   float(np.max(np.abs(g["Q"] - Qr))), abs(g["T"] - Tr))
    probe = np.array([0.3, 0.1, -0.2, 0.4, -1.2, 0.2, 0.1, -0.3])
    boost_ok = all(mk.verify_extended_canonical(mk.boost_canonical_map(_random_boost(RNG)), probe).passed()
                   for _ in range(10))
    scaling = mk.verify_extended_canonical(mk.scaling_map(2.0), probe)
    ok = h1 < 1e-12 and shell < 1e-12 and grad < 1e-6 and boost_ok and not scaling.passed()
    acceptance(5, "Lorentz invariance", ok,
               f"H1 {h1:.2e}, mass shell {shell:.2e} (< 1e-12), gradients {grad:.2e} (< 1e-6), "
               f"boost canonical {boost_ok}, scaling rejected {not scaling.passed()}")


def test_c06_hessian(acceptance):
    fields = (FieldConfig.zero(), FieldConfig.uniform_electric((0.3, -0.1, 0.2)),
              FieldConfig.uniform_magnetic((0.2, 0.5, -0.4)), FieldConfig.plane_wave((0, 0.3, 0), (0.7, 0, 0)),
              FieldConfig.coulomb(0.5, 0.1))
    worst = 0.0
    for m in (0.5, 1.0, 2.0):
        p = ParticleParams(m=m)
        for f in fields:
            vel = ExtendedVelocity.on_shell(RNG.uniform(-0.5, 0.5, 3))
            det = hessian_determinant(p, vel, RNG.uniform(-1, 1, 3), 0.3, f)
            worst = max(worst, abs(det - m**4) / m**4)
    acceptance(6, "mixed-form Hessian determinant", worst < 1e-8, f"max rel error {worst:.2e} (< 1e-8)")


def test_c07_kernel_cross_validation(acceptance, params):
    t0 = time.perf_counter()
    disc = [kernel_free(params, SpacetimeSeparation((0, 0, 0), x)).discrepancy for x in (0.5, 1.0, 2.0, 5.0, 10.0)]
    elapsed = time.perf_counter() - t0
    ok = max(disc) < 1e-5 and elapsed < 10.0
    acceptance(7, "kernel cross-validation", ok,
               "rel " + ", ".join(f"{d:.1e}" for d in disc) + f" (< 1e-5), {elapsed:.2f} s (< 10 s)")


def test_c08_special_functions(acceptance):
    x = np.geomspace(1e-3, 1e3, 50)
    j1, y1 = bessel_j1(x), bessel_y1(x)
    worst = 0.0
    with mpmath.workdps(40):
        for xi, a, b in zip(x, j1, y1):
            worst = max(worst, abs(a - float(mpmath.besselj(1, xi))) / abs(float(mpmath.besselj(1, xi))),
                        abs(b - float(mpmath.bessely(1, xi))) / abs(float(mpmath.bessely(1, xi))))
    w = np.max(np.abs((j1 * bessel_y0(x) - bessel_j0(x) * y1) * math.pi * x / 2 - 1))
    ok = worst < 1e-10 and w < 1e-9
    acceptance(8, "special functions", ok, f"J1/Y1 rel {worst:.2e} (< 1e-10), Wronskian {w:.2e} (< 1e-9)")


def test_c09_klein_gordon(acceptance, params):
    res = [kg_residual(kernel_grid(params, (2.0, 3.0), (0.5, 1.5), h), params, event=(0.0, (0, 0, 0))).max_abs
           for h in (0.04, 0.02, 0.01)]
    ratios = [res[i] / res[i + 1] for i in range(2)]
    k = 0.7
    om = math.sqrt(1 + k * k)
    pw = [kg_residual(plane_wave_grid("1+1", [k], om, (h, h), (5, 5)), params).max_abs for h in (0.02, 0.01, 0.005)]
    orders = observed_orders(pw)
    ok = all(3.6 <= r <= 4.4 for r in ratios) and min(orders) > 1.9
    acceptance(9, "Klein-Gordon consistency", ok,
               f"kernel ratios {ratios[0]:.3f}, {ratios[1]:.3f} (4 +- 10%), plane-wave orders "
               + ", ".join(f"{o:.3f}" for o in orders))


def test_c10_short_time_step(acceptance, params):
    k, om_off = 0.7, 1.6
    om_on = math.sqrt(1 + k * k)
    delta = off_shell_mismatch(params, [k], om_off)
    off, on = [], []
    for eps in (0.04, 0.02, 0.01, 0.005):
        g = plane_wave_grid("1+1", [k], om_off, (1e-3, 1e-3), (3, 3))
        off.append(abs(short_time_step(g, params, eps).psi[1, 1] / g.psi[1, 1] - (1 - 1j * eps * delta / 2)))
        g = plane_wave_grid("1+1", [k], om_on, (1e-3, 1e-3), (3, 3))
        on.append(abs(short_time_step(g, params, eps).psi[1, 1] / g.psi[1, 1] - 1))
    o1, o2 = observed_orders(off), observed_orders(on)
    ok = min(o1) >= 1.9 and min(o2) >= 1.9
    acceptance(10, "short-time step", ok, f"off-shell orders min {min(o1):.3f}, on-shell min {min(o2):.3f} (>= 1.9)")


def test_c11_hamilton_jacobi(acceptance, params):
    S = free_particle_hj_action(params)
    worst = 0.0
    for _ in range(50):
        t = RNG.uniform(1.0, 3.0)
        q = RNG.uniform(-0.5, 0.5, 3) * t
        worst = max(worst, abs(hj_residual(params, S, q, t)))
    acceptance(11, "Hamilton-Jacobi", worst < 1e-7, f"max residual {worst:.2e} (< 1e-7)")


def test_c12_semigroup(acceptance, params):
    worst = 0.0
    for qa, qb, s1, s2 in ((0.1, 0.7, 0.6, 0.9), (-0.4, 0.3, 1.2, 0.5), (0.0, 1.5, 2.0, 1.0)):
        val, _ = compose_slices(params, qa, qb, s1, s2)
        ref = kernel_sigma_slice(params, qa, qb, s1 + s2)
        worst = max(worst, abs(val - ref) / abs(ref))
    acceptance(12, "semigroup", worst < 1e-4, f"max rel error {worst:.2e} (< 1e-4)")


def test_c13_determinism(acceptance, tmp_path, capsys):
    t0 = time.perf_counter()
    codes = [cli.main(["verify", "--suite", "all", "--seed", "7", "--out", str(tmp_path / d)]) for d in ("a", "b")]
    elapsed = (time.perf_counter() - t0) / 2
    capsys.readouterr()
    same = (tmp_path / "a" / "verify_report.json").read_bytes() == (tmp_path / "b" / "verify_report.json").read_bytes()
    ok = codes == [0, 0] and same and elapsed < 60.0
    acceptance(13, "determinism", ok, f"exit codes {codes}, identical reports {same}, {elapsed:.1f} s per run (< 60 s)")
