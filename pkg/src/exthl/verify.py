"""Invariant suites run by ``exthl verify``.

Each suite evaluates named invariants at pinned tolerances and seeds and
records the measured value next to its threshold. Reports contain no
timings, so two runs with the same seed serialize to identical bytes.
"""
from __future__ import annotations

import contextlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import minkowski as mk
from .dynamics.functionals import (
    extended_hamiltonian_em,
    free_particle_hj_action,
    hessian_determinant,
    hj_residual,
    legendre_roundtrip_check,
)
from .dynamics.integrate import (
    gamma_identity_residual,
    integrate_conventional,
    integrate_extended,
    reparameterize_to_t,
)
from .dynamics.scenarios import (
    cyclotron_oracle,
    cyclotron_scenario,
    free_scenario,
    hyperbolic_oracle,
    hyperbolic_scenario,
)
from .dynamics.state import ExtendedPhasePoint, ExtendedVelocity, ParticleParams
from .fields import FieldConfig
from .numerics.bessel import bessel_j0, bessel_j1, bessel_y0, bessel_y1
from .numerics.specs import OdeSpec
from .propagator.kernels import (
    SpacetimeSeparation,
    compose_slices,
    kernel_closed_form,
    kernel_free,
    kernel_sigma_free,
    kernel_sigma_slice,
    lattice_kernel,
)
from .propagator.klein_gordon import (
    kernel_grid,
    kg_residual,
    off_shell_mismatch,
    plane_wave_grid,
    short_time_step,
)
from .propagator.wavepacket import PacketSpec, calibrate_norm

__all__ = [
    "SUITES",
    "Invariant",
    "SuiteReport",
    "run_suite",
    "run_suites",
    "metric_override",
    "scenario_trajectories",
    "equivalence_error",
    "cyclotron_frequency_error",
    "observed_orders",
    "reports_to_json",
]

SUITES = ("dynamics", "minkowski", "propagator")
DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class Invariant:
    """``measured <relation> threshold`` with ``relation`` in ``{"<", ">", "within"}``.

    For ``"within"`` the threshold is a ``[low, high]`` interval.
    """

    id: str
    measured: float
    threshold: float | list
    relation: str = "<"

    @property
    def passed(self) -> bool:
        m = float(self.measured)
        if not math.isfinite(m):
            return False
        if self.relation == "<":
            return bool(m < self.threshold)
        if self.relation == ">":
            return bool(m > self.threshold)
        lo, hi = self.threshold
        return bool(lo <= m <= hi)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["measured"] = float(self.measured)
        d["passed"] = self.passed
        return d


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    seed: int
    invariants: tuple

    @property
    def passed(self) -> bool:
        return all(inv.passed for inv in self.invariants)

    @property
    def failures(self) -> list[str]:
        return [inv.id for inv in self.invariants if not inv.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "invariants": [inv.to_dict() for inv in self.invariants],
        }

    def to_text(self) -> str:
        lines = [f"suite {self.suite} (seed {self.seed})"]
        for inv in self.invariants:
            thr = inv.threshold if inv.relation != "within" else f"[{inv.threshold[0]:.6g}, {inv.threshold[1]:.6g}]"
            thr = f"{thr:.3g}" if isinstance(thr, float) else thr
            lines.append(
                f"  {'PASS' if inv.passed else 'FAIL'}  {inv.id}: {inv.measured:.6g} {inv.relation} {thr}"
            )
        return "\n".join(lines)


@contextlib.contextmanager
def metric_override(metric):
    """Temporarily replace the module-level metric (used for mutation checks)."""
    saved = mk.METRIC
    mk.METRIC = np.asarray(metric, dtype=float)
    try:
        yield
    finally:
        mk.METRIC = saved


# -- shared measurements ------------------------------------------------------


def scenario_trajectories(n_periods: float = 100.0, spec: OdeSpec | None = None, dense: bool = False):
    """Extended trajectories of the three reference scenarios over ``n_periods``."""
    spec = spec or OdeSpec(rel_tol=1e-10)
    out = {}
    for sc in (free_scenario(), cyclotron_scenario(speed=0.9), hyperbolic_scenario()):
        out[sc.name] = (sc, integrate_extended(sc.params, sc.point0, sc.field, sc.span(n_periods), spec, dense=dense))
    return out


def equivalence_error(sc, record, spec: OdeSpec | None = None) -> float:
    """Largest relative mismatch of ``q`` and ``p`` between the reparameterized
    extended trajectory and a conventional integration, on the conventional samples."""
    spec = spec or record.spec
    conv = integrate_conventional(sc.params, sc.point0.q, sc.point0.p, (record.t[0], record.t[-1]), sc.field, spec)
    rep = reparameterize_to_t(record, t_grid=conv.t)
    p = sc.params
    q_scale = max(float(np.max(np.abs(conv.q))), p.hbar / (p.m * p.c))
    p_scale = max(float(np.max(np.abs(conv.p))), p.m * p.c)
    return max(
        float(np.max(np.abs(rep.q - conv.q))) / q_scale,
        float(np.max(np.abs(rep.p - conv.p))) / p_scale,
    )


def cyclotron_frequency_error(sc, record) -> float:
    """Relative error of the orbital angular frequency fitted to ``q(t)``
    against ``zeta B/(gamma m c)``."""
    p = sc.params
    B = float(sc.field.params["B"][2])
    k = sc.point0.p - (p.zeta / p.c) * 0.5 * np.cross(sc.field.params["B"], sc.point0.q)
    gamma = math.sqrt(1.0 + float(k @ k) / (p.m * p.c) ** 2)
    expected = p.zeta * B / (gamma * p.m * p.c)
    angle = np.unwrap(np.arctan2(-record.q[:, 1], record.q[:, 0]))
    slope = np.polyfit(record.t, angle, 1)[0]
    return abs(slope - expected) / abs(expected)


def observed_orders(errors) -> list[float]:
    e = np.asarray(errors, dtype=float)
    return [float(v) for v in np.log2(e[:-1] / e[1:])]


# -- dynamics -----------------------------------------------------------------


def _dynamics(rng: np.random.Generator) -> list[Invariant]:
    inv = []
    trajs = scenario_trajectories(dense=True)
    for name, (sc, rec) in trajs.items():
        inv.append(Invariant(f"dynamics.constraint.{name}", rec.max_constraint_residual(), 1e-9))
        inv.append(Invariant(f"dynamics.gamma_identity.{name}", gamma_identity_residual(rec), 1e-9))
        inv.append(Invariant(f"dynamics.equivalence.{name}", equivalence_error(sc, rec), 1e-6))
    sc, rec = trajs["uniform-B"]
    inv.append(Invariant("dynamics.cyclotron_frequency", cyclotron_frequency_error(sc, rec), 1e-6))
    orbit = cyclotron_oracle(sc, rec.t)
    R = float(sc.point0.q[0])
    inv.append(Invariant("dynamics.cyclotron_orbit", float(np.max(np.abs(rec.q - orbit))) / R, 1e-6))
    sc, rec = trajs["uniform-E"]
    x, t = hyperbolic_oracle(sc, rec.s)
    inv.append(Invariant("dynamics.hyperbolic_x", float(np.max(np.abs(rec.q[:, 0] - x)) / np.max(np.abs(x))), 1e-8))
    inv.append(Invariant("dynamics.hyperbolic_t", float(np.max(np.abs(rec.t - t)) / np.max(np.abs(t))), 1e-8))

    fields = (
        FieldConfig.zero(),
        FieldConfig.uniform_electric((0.3, -0.1, 0.2)),
        FieldConfig.uniform_magnetic((0.2, 0.5, -0.4)),
        FieldConfig.plane_wave((0.0, 0.3, 0.0), (0.7, 0.0, 0.0)),
        FieldConfig.coulomb(0.5, 0.1),
    )
    worst = 0.0
    for m in (0.5, 1.0, 2.0):
        params = ParticleParams(m=m)
        for f in fields:
            v = rng.uniform(-0.5, 0.5, 3)
            q = rng.uniform(-1.0, 1.0, 3)
            det = hessian_determinant(params, ExtendedVelocity.on_shell(v), q, 0.3, f)
            worst = max(worst, abs(det - m**4) / m**4)
    inv.append(Invariant("dynamics.hessian_mixed_det", worst, 1e-8))

    params = ParticleParams()
    S = free_particle_hj_action(params)
    worst = 0.0
    for _ in range(20):
        t = rng.uniform(1.0, 3.0)
        q = rng.uniform(-0.5, 0.5, 3) * t
        worst = max(worst, abs(hj_residual(params, S, q, t)))
    inv.append(Invariant("dynamics.hamilton_jacobi", worst, 1e-7))

    worst = 0.0
    for f in fields:
        v = rng.uniform(-0.5, 0.5, 3)
        rep = legendre_roundtrip_check(params, ExtendedVelocity.on_shell(v), rng.uniform(-1, 1, 3), 0.2, f)
        worst = max(worst, rep.identity_error)
    inv.append(Invariant("dynamics.legendre_roundtrip", worst, 1e-12))
    return inv


# -- minkowski ----------------------------------------------------------------


def _random_beta(rng: np.random.Generator, max_speed: float = 0.9) -> mk.BoostParams:
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return mk.BoostParams(d * max_speed * rng.uniform(0.0, 1.0) ** (1.0 / 3.0))


def _minkowski(rng: np.random.Generator) -> list[Invariant]:
    inv = []
    params = ParticleParams()
    m, c = params.m, params.c
    h1_worst = shell_worst = interval_worst = mass_worst = 0.0
    for _ in range(100):
        b = _random_beta(rng)
        q, t = rng.uniform(-1, 1, 3), rng.uniform(-1, 1)
        k = rng.uniform(-1, 1, 3)
        # slightly off shell so that H1 is not identically zero
        e = math.sqrt(c * c * float(k @ k) + (m * c * c) ** 2) * rng.uniform(0.9, 1.1)
        Q, T = mk.boost_coordinates(q, t, b, c)
        P, E = mk.boost_momentum_energy(k, e, b, c, inverse=True)
        before = ExtendedPhasePoint(0.0, t, e, q, k)
        after = ExtendedPhasePoint(0.0, T, E, Q, P)
        h1a = extended_hamiltonian_em(params, before)
        h1b = extended_hamiltonian_em(params, after)
        h1_worst = max(h1_worst, abs(h1a - h1b) / (m * c * c))
        sa = mk.minkowski_dot(np.append(e / c, k), np.append(e / c, k)) + (m * c) ** 2
        sb = mk.minkowski_dot(np.append(E / c, P), np.append(E / c, P)) + (m * c) ** 2
        shell_worst = max(shell_worst, abs(sa - sb) / (m * c) ** 2)
        x = np.append(c * t, q)
        X = np.append(c * T, Q)
        interval_worst = max(interval_worst, abs(mk.minkowski_dot(x, x) - mk.minkowski_dot(X, X)))
        # an on-shell four-momentum has p.p = -m^2 c^2
        e_on = math.sqrt(c * c * float(k @ k) + (m * c * c) ** 2)
        pon = np.append(e_on / c, k)
        mass_worst = max(mass_worst, abs(mk.minkowski_dot(pon, pon) + (m * c) ** 2) / (m * c) ** 2)
    inv.append(Invariant("minkowski.h1_boost_invariance", h1_worst, 1e-12))
    inv.append(Invariant("minkowski.mass_shell_boost_invariance", shell_worst, 1e-12))
    inv.append(Invariant("minkowski.interval_boost_invariance", interval_worst, 1e-12))
    inv.append(Invariant("minkowski.mass_shell_metric", mass_worst, 1e-12))

    grad_worst = 0.0
    for _ in range(20):
        b = _random_beta(rng)
        q, t = rng.uniform(-1, 1, 3), rng.uniform(-1, 1)
        P = rng.uniform(-1, 1, 3)
        E = math.sqrt(float(P @ P) + 1.0) * c
        g = mk.boost_generating_gradients(q, P, t, E, b, c)
        p_rule, e_rule = mk.boost_momentum_energy(P, E, b, c)
        Q_rule, T_rule = mk.boost_coordinates(q, t, b, c)
        grad_worst = max(
            grad_worst,
            float(np.max(np.abs(g["p_k"] - p_rule))),
            abs(g["e_k"] - e_rule),
            float(np.max(np.abs(g["Q"] - Q_rule))),
            abs(g["T"] - T_rule),
        )
    inv.append(Invariant("minkowski.generating_gradients", grad_worst, 1e-6))

    probe = np.array([0.3, 0.1, -0.2, 0.4, -1.2, 0.2, 0.1, -0.3])
    canon = 0.0
    for _ in range(10):
        canon = max(canon, mk.verify_extended_canonical(mk.boost_canonical_map(_random_beta(rng)), probe).max_violation)
    inv.append(Invariant("minkowski.canonical_boost", canon, 1e-6))
    inv.append(Invariant(
        "minkowski.canonical_rejects_scaling",
        mk.verify_extended_canonical(mk.scaling_map(2.0), probe).max_violation, 0.1, ">",
    ))
    rt = 0.0
    for _ in range(20):
        b = _random_beta(rng)
        q, t = rng.uniform(-1, 1, 3), rng.uniform(-1, 1)
        Q, T = mk.boost_coordinates(q, t, b)
        q2, t2 = mk.unboost_coordinates(Q, T, b)
        rt = max(rt, float(np.max(np.abs(q2 - q))), abs(t2 - t))
    inv.append(Invariant("minkowski.boost_roundtrip", rt, 1e-12))
    return inv


# -- propagator ---------------------------------------------------------------


def _propagator(rng: np.random.Generator) -> list[Invariant]:
    inv = []
    params = ParticleParams()
    worst = 0.0
    for tau in (0.5, 1.0, 2.0, 5.0, 10.0):
        worst = max(worst, kernel_free(params, SpacetimeSeparation((0.0, 0.0, 0.0), tau)).discrepancy)
    inv.append(Invariant("propagator.kernel_cross_validation", worst, 1e-5))

    worst = 0.0
    for _ in range(10):
        dq = rng.uniform(-1, 1, 3)
        dt = rng.uniform(-2, 2)
        sigma = rng.uniform(0.2, 3.0)
        sep = SpacetimeSeparation(dq, dt)
        prod = params.c * kernel_sigma_slice(params, 0.0, params.c * dt, sigma, timelike=True)
        for j in range(3):
            prod *= kernel_sigma_slice(params, 0.0, dq[j], sigma)
        prod *= np.exp(-0.5j * params.m * params.c**2 * sigma / params.hbar)
        ref = kernel_sigma_free(params, sep, sigma).amplitude
        worst = max(worst, abs(prod - ref) / abs(ref))
    inv.append(Invariant("propagator.slice_product", worst, 1e-12))

    val, _ = compose_slices(params, 0.1, 0.7, 0.6, 0.9)
    ref = kernel_sigma_slice(params, 0.1, 0.7, 1.5)
    inv.append(Invariant("propagator.semigroup", abs(val - ref) / abs(ref), 1e-4))
    val, _ = lattice_kernel(params, 0.1, 0.7, [0.6, 0.9, 1.0])
    ref = kernel_sigma_slice(params, 0.1, 0.7, 2.5)
    inv.append(Invariant("propagator.lattice_two_inner_slices", abs(val - ref) / abs(ref), 1e-4))

    worst = 0.0
    for _ in range(10):
        b = _random_beta(rng)
        q = rng.uniform(-0.5, 0.5, 3)
        t = rng.uniform(1.0, 3.0)
        Q, T = mk.boost_coordinates(q, t, b)
        k1 = kernel_closed_form(params, SpacetimeSeparation(q, t).tau)
        k2 = kernel_closed_form(params, SpacetimeSeparation(Q, T).tau)
        worst = max(worst, abs(k1 - k2) / abs(k1))
    inv.append(Invariant("propagator.kernel_lorentz_invariance", worst, 1e-12))

    res = []
    for h in (0.04, 0.02, 0.01):
        g = kernel_grid(params, (2.0, 3.0), (0.5, 1.5), h)
        res.append(kg_residual(g, params, event=(0.0, (0.0, 0.0, 0.0))).max_abs)
    ratios = [res[i] / res[i + 1] for i in range(2)]
    for i, r in enumerate(ratios):
        inv.append(Invariant(f"propagator.kg_kernel_ratio_{i + 1}", r, [3.6, 4.4], "within"))

    k = 0.7
    om_on = math.sqrt(params.m**2 + k * k)
    errs = []
    for h in (0.02, 0.01, 0.005):
        g = plane_wave_grid("1+1", [k], om_on, (h, h), (5, 5))
        errs.append(kg_residual(g, params).max_abs)
    inv.append(Invariant("propagator.kg_plane_wave_order", min(observed_orders(errs)), 1.9, ">"))

    om_off = 1.6
    delta = off_shell_mismatch(params, [k], om_off)
    off, on = [], []
    for eps in (0.04, 0.02, 0.01, 0.005):
        g = plane_wave_grid("1+1", [k], om_off, (1e-3, 1e-3), (3, 3))
        ratio = short_time_step(g, params, eps).psi[1, 1] / g.psi[1, 1]
        off.append(abs(ratio - (1.0 - 1j * eps * delta / (2.0 * params.m * params.hbar))))
        g = plane_wave_grid("1+1", [k], om_on, (1e-3, 1e-3), (3, 3))
        on.append(abs(short_time_step(g, params, eps).psi[1, 1] / g.psi[1, 1] - 1.0))
    inv.append(Invariant("propagator.short_time_off_shell_order", min(observed_orders(off)), 1.9, ">"))
    inv.append(Invariant("propagator.short_time_on_shell_order", min(observed_orders(on)), 1.9, ">"))

    x = np.geomspace(1e-2, 1e2, 25)
    inv.append(Invariant("propagator.bessel_wronskian", _wronskian_error(x), 1e-9))

    fast = dict(n_target_r=61, n_angle=32, target_times=(110.0, 120.0), n_r=30, n_t=15)
    n1 = calibrate_norm(PacketSpec(width=10.0, **fast), params)
    n2 = calibrate_norm(PacketSpec(width=8.0, **fast), params)
    inv.append(Invariant("propagator.norm_width_consistency", abs(n1.N - n2.N) / n1.N, 1e-2))
    return inv


def _wronskian_error(x) -> float:
    w = bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x)
    return float(np.max(np.abs(w * (math.pi * x / 2.0) - 1.0)))


_RUNNERS = {"dynamics": _dynamics, "minkowski": _minkowski, "propagator": _propagator}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> SuiteReport:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES} or 'all'")
    rng = np.random.default_rng(seed)
    return SuiteReport(name, int(seed), tuple(_RUNNERS[name](rng)))


def run_suites(name: str, seed: int = DEFAULT_SEED) -> list[SuiteReport]:
    names = SUITES if name == "all" else (name,)
    return [run_suite(n, seed) for n in names]


def reports_to_json(reports: list[SuiteReport]) -> str:
    doc = {
        "passed": all(r.passed for r in reports),
        "suites": [r.to_dict() for r in reports],
    }
    return json.dumps(doc, sort_keys=True, indent=1)
