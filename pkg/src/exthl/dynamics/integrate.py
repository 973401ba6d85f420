"""Integration of the extended canonical equations in ``s`` and of the
conventional equations in ``t``, reparameterization between the two, the
trivial extended flow and the classical action along a recorded path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, IntegrationError
from ..fields import FieldConfig, potential_kernel
from ..numerics.ode import OdeResult, integrate_ode
from ..numerics.specs import OdeSpec
from .functionals import ConventionalHamiltonian, constraint_residuals, em_hamiltonian
from .state import ExtendedPhasePoint, ExtendedVelocity, ParticleParams

__all__ = [
    "TrajectoryRecord",
    "ConventionalTrajectory",
    "extended_rhs",
    "conventional_rhs",
    "integrate_extended",
    "integrate_conventional",
    "reparameterize_to_t",
    "trivial_extended_flow",
    "gamma_identity_residual",
    "classical_action",
    "free_classical_action",
]

STATE_LABELS = ("t", "e", "q1", "q2", "q3", "p1", "p2", "p3")


@dataclass(frozen=True)
class TrajectoryRecord:
    """Samples of an extended trajectory.

    ``y[i]`` is the state ``[t, e, q1, q2, q3, p1, p2, p3]`` at ``s[i]`` and
    ``dyds[i]`` its parameter derivative. Constraint diagnostics are stored
    per sample in ``residual_v``, ``residual_e`` and ``e1``.
    """

    s: np.ndarray
    y: np.ndarray
    dyds: np.ndarray
    residual_v: np.ndarray
    residual_e: np.ndarray
    e1: np.ndarray
    stats: dict
    params: ParticleParams
    field: FieldConfig
    spec: OdeSpec
    kind: str = "extended"
    _ode: OdeResult | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return self.s.size

    @property
    def t(self) -> np.ndarray:
        return self.y[:, 0]

    @property
    def e(self) -> np.ndarray:
        return self.y[:, 1]

    @property
    def q(self) -> np.ndarray:
        return self.y[:, 2:5]

    @property
    def p(self) -> np.ndarray:
        return self.y[:, 5:8]

    @property
    def has_dense(self) -> bool:
        return self._ode is not None and self._ode.has_dense

    def point(self, i: int) -> ExtendedPhasePoint:
        return ExtendedPhasePoint.from_state(self.s[i], self.y[i])

    def state_at(self, s) -> np.ndarray:
        """State at arbitrary ``s`` (dense output if recorded, else cubic Hermite)."""
        if self.has_dense:
            return self._ode(s)
        return _hermite(self.s, self.y, self.dyds, s)

    def max_constraint_residual(self) -> float:
        return float(max(np.max(np.abs(self.residual_v)), np.max(np.abs(self.residual_e))))

    def e1_drift(self) -> float:
        return float(np.max(np.abs(self.e1 - self.e1[0])))

    def metadata(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params.to_dict(),
            "field": self.field.to_dict(),
            "spec": self.spec.to_dict(),
            "stats": dict(self.stats),
            "n_samples": int(self.s.size),
        }


@dataclass(frozen=True)
class ConventionalTrajectory:
    """Trajectory in coordinate time: ``q(t)``, ``p(t)``, ``e(t)``.

    ``s`` is filled when the samples come from a reparameterized extended
    trajectory.
    """

    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    e: np.ndarray
    stats: dict = field(default_factory=dict)
    s: np.ndarray | None = None
    _ode: OdeResult | None = field(default=None, repr=False, compare=False)

    def at(self, t) -> np.ndarray:
        """``[q, p, e]`` at arbitrary ``t`` (only for integrated trajectories with dense output)."""
        if self._ode is None or not self._ode.has_dense:
            raise IntegrationError("this trajectory carries no dense output")
        return self._ode(t)


def _hermite(x: np.ndarray, y: np.ndarray, dy: np.ndarray, xq) -> np.ndarray:
    scalar = np.ndim(xq) == 0
    xq = np.atleast_1d(np.asarray(xq, dtype=float))
    idx = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, x.size - 2)
    x0, x1 = x[idx], x[idx + 1]
    h = (x1 - x0)[:, None]
    u = ((xq - x0) / (x1 - x0))[:, None]
    h00 = 2 * u**3 - 3 * u**2 + 1
    h10 = u**3 - 2 * u**2 + u
    h01 = -2 * u**3 + 3 * u**2
    h11 = u**3 - u**2
    out = h00 * y[idx] + h10 * h * dy[idx] + h01 * y[idx + 1] + h11 * h * dy[idx + 1]
    return out[0] if scalar else out


def extended_rhs(params: ParticleParams, field: FieldConfig):
    """Right-hand side of the extended canonical equations for ``[t, e, q, p]``.

    With ``k = p - zeta A/c`` and ``e_k = e - zeta phi``::

        dt/ds = e_k/(m c^2)
        de/ds = -(zeta/(m c)) k.dA/dt + (zeta/(m c^2)) e_k dphi/dt
        dq/ds = k/m
        dp_i/ds = (zeta/(m c)) k.dA/dq_i - (zeta/(m c^2)) e_k dphi/dq_i
    """
    pk = potential_kernel(field)
    m, c, z = params.m, params.c, params.zeta
    inv_m = 1.0 / m
    inv_mc2 = 1.0 / (m * c * c)
    zc = z / c
    zmc = z / (m * c)
    zmc2 = z * inv_mc2
    static = field.is_static

    def rhs(s, y):
        phi, A, gphi, dphit, dAq, dAt = pk(y[2:5], y[0])
        k = y[5:8] - zc * A
        ek = y[1] - z * phi
        out = np.empty(8)
        out[0] = ek * inv_mc2
        out[1] = 0.0 if static else zmc2 * ek * dphit - zmc * (k @ dAt)
        out[2:5] = k * inv_m
        out[5:8] = zmc * (k @ dAq) - (zmc2 * ek) * gphi
        return out

    return rhs


def conventional_rhs(params: ParticleParams, field: FieldConfig):
    """Right-hand side in coordinate time for ``[q, p, e]`` with ``W = sqrt(c^2 k^2 + m^2 c^4)``::

        dq/dt = c^2 k/W
        dp_i/dt = zeta c k.dA/dq_i / W - zeta dphi/dq_i
        de/dt = -zeta c k.dA/dt / W + zeta dphi/dt
    """
    pk = potential_kernel(field)
    m, c, z = params.m, params.c, params.zeta
    zc = z / c
    c2 = c * c
    mc2sq = (m * c2) ** 2
    static = field.is_static

    def rhs(t, y):
        phi, A, gphi, dphit, dAq, dAt = pk(y[0:3], t)
        k = y[3:6] - zc * A
        inv_w = 1.0 / math.sqrt(c2 * (k @ k) + mc2sq)
        out = np.empty(7)
        out[0:3] = (c2 * inv_w) * k
        out[3:6] = (z * c * inv_w) * (k @ dAq) - z * gphi
        out[6] = 0.0 if static else z * dphit - z * c * inv_w * (k @ dAt)
        return out

    return rhs


def _diagnostics(params: ParticleParams, field: FieldConfig, s: np.ndarray, y: np.ndarray):
    n = s.size
    rv = np.empty(n)
    re = np.empty(n)
    e1 = np.empty(n)
    pk = potential_kernel(field)
    m, c, z = params.m, params.c, params.zeta
    mc2 = m * c * c
    for i in range(n):
        phi, A, *_ = pk(y[i, 2:5], y[i, 0])
        k = y[i, 5:8] - (z / c) * A
        ek = y[i, 1] - z * phi
        kk = float(k @ k)
        # velocity form with the canonical velocities dq/ds = k/m, dt/ds = e_k/(m c^2)
        rv[i] = (ek / mc2) ** 2 - kk / (m * c) ** 2 - 1.0
        re[i] = (ek * ek - c * c * kk - mc2 * mc2) / (mc2 * mc2)
        e1[i] = (kk - (ek / c) ** 2) / (2.0 * m) + 0.5 * mc2
    return rv, re, e1


def integrate_extended(
    params: ParticleParams,
    point0: ExtendedPhasePoint,
    field: FieldConfig | None = None,
    span: tuple[float, float] = (0.0, 1.0),
    spec: OdeSpec | None = None,
    dense: bool = False,
    check_constraint: bool = True,
    constraint_tol: float = 1e-9,
) -> TrajectoryRecord:
    """Integrate the extended canonical equations from ``point0`` over ``span`` in ``s``.

    ``point0`` must lie on the constraint surface (normalized energy residual
    below ``constraint_tol``) unless ``check_constraint=False``. Only the
    forward-time branch ``dt/ds > 0`` is accepted.
    """
    field = field if field is not None else FieldConfig.zero()
    spec = spec or OdeSpec()
    rep = constraint_residuals(params, point0, field)
    if check_constraint and abs(rep.energy_constraint_residual) > constraint_tol:
        raise DomainError(
            f"initial point is off the constraint surface (normalized residual {rep.energy_constraint_residual:.3g})"
        )
    rhs = extended_rhs(params, field)
    y0 = point0.state_vector()
    if rhs(span[0], y0)[0] <= 0.0:
        raise DomainError("backward-time branch (dt/ds <= 0) is not supported")
    res = integrate_ode(rhs, y0, span, spec, dense=dense)
    rv, re, e1 = _diagnostics(params, field, res.s, res.y)
    return TrajectoryRecord(res.s, res.y, res.f, rv, re, e1, res.stats, params, field, spec, "extended", res)


def integrate_conventional(
    params: ParticleParams,
    q0,
    p0,
    t_span: tuple[float, float],
    field: FieldConfig | None = None,
    spec: OdeSpec | None = None,
    dense: bool = False,
) -> ConventionalTrajectory:
    """Integrate the conventional equations in ``t``; ``e`` starts at ``H(q0, p0, t0)``."""
    field = field if field is not None else FieldConfig.zero()
    spec = spec or OdeSpec()
    H = em_hamiltonian(params, field)
    q0 = np.asarray(q0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    e0 = H(q0, p0, t_span[0])
    y0 = np.concatenate([q0, p0, [e0]])
    res = integrate_ode(conventional_rhs(params, field), y0, t_span, spec, dense=dense)
    return ConventionalTrajectory(res.s, res.y[:, 0:3], res.y[:, 3:6], res.y[:, 6], res.stats, None, res)


def reparameterize_to_t(record: TrajectoryRecord, t_grid=None, n: int | None = None) -> ConventionalTrajectory:
    """Resample an extended trajectory on a ``t``-grid.

    For each requested ``t`` the parameter ``s(t)`` is found by Newton
    iteration on the continuous extension of ``t(s)`` (using ``dt/ds``),
    started from a bracket located in the monotone samples. The default grid
    is uniform with as many points as the record.
    """
    t_s = record.t
    if np.any(np.diff(t_s) <= 0.0):
        raise DomainError("t(s) is not strictly increasing; constraint violated or backward branch")
    if t_grid is None:
        t_grid = np.linspace(t_s[0], t_s[-1], n or t_s.size)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.min() < t_s[0] - 1e-12 * max(1.0, abs(t_s[0])) or t_grid.max() > t_s[-1] + 1e-12 * max(
        1.0, abs(t_s[-1])
    ):
        raise DomainError("requested t outside the recorded time range")
    s_out = np.interp(t_grid, t_s, record.s)
    s_lo, s_hi = record.s[0], record.s[-1]
    for _ in range(30):
        st = np.clip(s_out, s_lo, s_hi)
        ys = np.atleast_2d(record.state_at(st))
        dtds = _dtds(record, ys)
        delta = (ys[:, 0] - t_grid) / dtds
        s_out = np.clip(st - delta, s_lo, s_hi)
        if np.max(np.abs(delta)) <= 1e-15 * max(1.0, np.max(np.abs(s_out))):
            break
    ys = np.atleast_2d(record.state_at(s_out))
    return ConventionalTrajectory(t_grid, ys[:, 2:5], ys[:, 5:8], ys[:, 1], dict(record.stats), s_out)


def _dtds(record: TrajectoryRecord, ys: np.ndarray) -> np.ndarray:
    params, field = record.params, record.field
    if record.kind == "trivial":
        return np.ones(ys.shape[0])
    pk = potential_kernel(field)
    out = np.empty(ys.shape[0])
    for i, y in enumerate(ys):
        phi = pk(y[2:5], y[0])[0]
        out[i] = (y[1] - params.zeta * phi) / (params.m * params.c**2)
    return out


def gamma_identity_residual(record: TrajectoryRecord) -> float:
    """Max of ``|dt/ds - sqrt(1 + (p_k/(m c))^2)|`` over the samples."""
    params = record.params
    pk = potential_kernel(record.field)
    worst = 0.0
    for y, f in zip(record.y, record.dyds):
        A = pk(y[2:5], y[0])[1]
        k = y[5:8] - (params.zeta / params.c) * A
        g = math.sqrt(1.0 + float(k @ k) / (params.m * params.c) ** 2)
        worst = max(worst, abs(f[0] - g))
    return worst


def trivial_extended_flow(
    params: ParticleParams,
    H: ConventionalHamiltonian,
    point0: ExtendedPhasePoint,
    span: tuple[float, float],
    spec: OdeSpec | None = None,
    field: FieldConfig | None = None,
    dense: bool = False,
) -> TrajectoryRecord:
    """Canonical flow of ``H1 = H - e``: ``dt/ds = 1``, ``de/ds = dH/dt`` and the conventional ``(q, p)`` flow.

    ``field`` is only used to fill the constraint diagnostics of the record.
    """
    spec = spec or OdeSpec()
    field = field if field is not None else FieldConfig.zero()

    def rhs(s, y):
        gq, gp, gt = H.grad(y[2:5], y[5:8], y[0])
        return np.concatenate([[1.0, gt], gp, -np.asarray(gq)])

    res = integrate_ode(rhs, point0.state_vector(), span, spec, dense=dense)
    rv, re, e1 = _diagnostics(params, field, res.s, res.y)
    return TrajectoryRecord(res.s, res.y, res.f, rv, re, e1, res.stats, params, field, spec, "trivial", res)


def _l1_along(record: TrajectoryRecord, s: np.ndarray) -> np.ndarray:
    params = record.params
    pk = potential_kernel(record.field)
    m, c, z = params.m, params.c, params.zeta
    ys = np.atleast_2d(record.state_at(s))
    out = np.empty(ys.shape[0])
    for i, y in enumerate(ys):
        phi, A, *_ = pk(y[2:5], y[0])
        k = y[5:8] - (z / c) * A
        ek = y[1] - z * phi
        vel = ExtendedVelocity(k / m, ek / (m * c * c))
        u = vel.dq_ds
        out[i] = 0.5 * m * c * c * (float(u @ u) / c**2 - vel.dt_ds**2 - 1.0) + (z / c) * float(A @ u) - z * phi * vel.dt_ds
    return out


def classical_action(record: TrajectoryRecord, rel_tol: float = 1e-10, max_level: int = 16) -> float:
    """``int L1 ds`` along the recorded path by Romberg integration.

    The velocities are the canonical ones, ``dq/ds = (p - zeta A/c)/m`` and
    ``dt/ds = (e - zeta phi)/(m c^2)``. Raises :class:`IntegrationError` when
    successive Romberg levels still disagree at ``max_level``.
    """
    a, b = float(record.s[0]), float(record.s[-1])
    rows = []
    n = 1
    prev = None
    for level in range(max_level + 1):
        s = np.linspace(a, b, n + 1)
        L = _l1_along(record, s)
        trap = (b - a) / n * (L.sum() - 0.5 * (L[0] + L[-1]))
        row = [trap]
        for j, val in enumerate(rows[-1] if rows else []):
            row.append(row[j] + (row[j] - val) / (4 ** (j + 1) - 1))
        rows.append(row)
        best = row[-1]
        if prev is not None and level >= 3 and abs(best - prev) <= rel_tol * max(abs(best), 1e-300):
            return float(best)
        prev = best
        n *= 2
    raise IntegrationError(
        f"action quadrature did not settle (last two Romberg estimates {prev!r}, {rows[-2][-1]!r})"
    )


def free_classical_action(params: ParticleParams, dq, dt: float, sigma: float) -> float:
    """``(m/2)(dq^2 - c^2 dt^2)/sigma - m c^2 sigma/2`` for the straight path over parameter span ``sigma``."""
    dq = np.asarray(dq, dtype=float)
    m, c = params.m, params.c
    return float(0.5 * m * (float(dq @ dq) - c * c * dt * dt) / sigma - 0.5 * m * c * c * sigma)
