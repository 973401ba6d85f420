"""Lagrangians, Hamiltonians, Legendre and Hessian checks, constraint
residuals and the Hamilton-Jacobi residual for a charged relativistic
particle in an external field.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError, HJDomainError
from ..fields import FieldConfig, eval_potentials
from ..minkowski import METRIC
from .state import ConstraintReport, ExtendedPhasePoint, ExtendedVelocity, ParticleParams, _vec3

__all__ = [
    "extended_lagrangian_em",
    "conventional_lagrangian_em",
    "nonrelativistic_lagrangian_em",
    "extended_hamiltonian_em",
    "conventional_hamiltonian_em",
    "nonrelativistic_hamiltonian_em",
    "kinetic_momentum",
    "LegendreReport",
    "legendre_roundtrip_check",
    "hessian_matrix",
    "hessian_determinant",
    "constraint_residuals",
    "point_from_velocity",
    "point_from_momentum",
    "ConventionalHamiltonian",
    "em_hamiltonian",
    "hj_residual",
    "free_particle_hj_action",
]


def _field(field: FieldConfig | None) -> FieldConfig:
    return field if field is not None else FieldConfig.zero()


def extended_lagrangian_em(
    params: ParticleParams, vel: ExtendedVelocity, q, t: float, field: FieldConfig | None = None
) -> float:
    """``L1 = (m c^2/2)[(dq/ds)^2/c^2 - (dt/ds)^2 - 1] + (zeta/c) A.dq/ds - zeta phi dt/ds``."""
    pot = eval_potentials(_field(field), q, t)
    m, c, z = params.m, params.c, params.zeta
    u = vel.dq_ds
    w = vel.dt_ds
    return float(
        0.5 * m * c**2 * (float(u @ u) / c**2 - w * w - 1.0) + (z / c) * float(pot.A @ u) - z * pot.phi * w
    )


def conventional_lagrangian_em(params: ParticleParams, v, q, t: float, field: FieldConfig | None = None) -> float:
    """``L = -m c^2 sqrt(1 - v^2/c^2) + (zeta/c) A.v - zeta phi``; requires ``|v| < c``."""
    v = _vec3(v, "v")
    m, c, z = params.m, params.c, params.zeta
    b2 = float(v @ v) / c**2
    if b2 >= 1.0:
        raise DomainError(f"|v|/c = {math.sqrt(b2):.17g} must be below 1")
    pot = eval_potentials(_field(field), q, t)
    return float(-m * c**2 * math.sqrt(1.0 - b2) + (z / c) * float(pot.A @ v) - z * pot.phi)


def nonrelativistic_lagrangian_em(params: ParticleParams, v, q, t: float, field: FieldConfig | None = None) -> float:
    """``m v^2/2 + (zeta/c) A.v - zeta phi - m c^2`` (the ``dt/ds -> 1`` limit of ``L1``)."""
    v = _vec3(v, "v")
    pot = eval_potentials(_field(field), q, t)
    m, c, z = params.m, params.c, params.zeta
    return float(0.5 * m * float(v @ v) + (z / c) * float(pot.A @ v) - z * pot.phi - m * c**2)


def kinetic_momentum(params: ParticleParams, point: ExtendedPhasePoint, field: FieldConfig | None = None):
    """``(p - zeta A/c, e - zeta phi)`` at the point."""
    pot = eval_potentials(_field(field), point.q, point.t)
    return point.p - (params.zeta / params.c) * pot.A, point.e - params.zeta * pot.phi


def extended_hamiltonian_em(params: ParticleParams, point: ExtendedPhasePoint, field: FieldConfig | None = None) -> float:
    """``H1 = [(p - zeta A/c)^2 - ((e - zeta phi)/c)^2]/(2m) + m c^2/2``."""
    k, ek = kinetic_momentum(params, point, field)
    m, c = params.m, params.c
    return float((float(k @ k) - (ek / c) ** 2) / (2.0 * m) + 0.5 * m * c**2)


def conventional_hamiltonian_em(params: ParticleParams, q, p, t: float, field: FieldConfig | None = None) -> float:
    """``H = sqrt(c^2 (p - zeta A/c)^2 + m^2 c^4) + zeta phi``."""
    pot = eval_potentials(_field(field), q, t)
    m, c, z = params.m, params.c, params.zeta
    k = _vec3(p, "p") - (z / c) * pot.A
    return float(math.sqrt(c**2 * float(k @ k) + (m * c**2) ** 2) + z * pot.phi)


def nonrelativistic_hamiltonian_em(params: ParticleParams, q, p, t: float, field: FieldConfig | None = None) -> float:
    """``(p - zeta A/c)^2/(2m) + zeta phi + m c^2``."""
    pot = eval_potentials(_field(field), q, t)
    m, c, z = params.m, params.c, params.zeta
    k = _vec3(p, "p") - (z / c) * pot.A
    return float(float(k @ k) / (2.0 * m) + z * pot.phi + m * c**2)


@dataclass(frozen=True)
class LegendreReport:
    p: np.ndarray
    e: float
    p_kinetic: np.ndarray
    e_kinetic: float
    h1: float
    l1: float
    sum_p_qdot: float
    identity_error: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p"] = self.p.tolist()
        d["p_kinetic"] = self.p_kinetic.tolist()
        return d


def legendre_roundtrip_check(
    params: ParticleParams, vel: ExtendedVelocity, q, t: float, field: FieldConfig | None = None
) -> LegendreReport:
    """Momenta from ``L1``, ``H1`` at those momenta, and the identity ``H1 + L1 = sum p_mu dq^mu/ds``.

    ``p = m dq/ds + (zeta/c) A`` and ``e = m c^2 dt/ds + zeta phi``; with
    ``p_0 = -e/c`` the sum is ``p.dq/ds - e dt/ds``.
    """
    field = _field(field)
    pot = eval_potentials(field, q, t)
    m, c, z = params.m, params.c, params.zeta
    p_kin = m * vel.dq_ds
    e_kin = m * c**2 * vel.dt_ds
    p = p_kin + (z / c) * pot.A
    e = e_kin + z * pot.phi
    point = ExtendedPhasePoint(0.0, t, e, q, p)
    h1 = extended_hamiltonian_em(params, point, field)
    l1 = extended_lagrangian_em(params, vel, q, t, field)
    total = float(p @ vel.dq_ds) - e * vel.dt_ds
    return LegendreReport(p, float(e), p_kin, float(e_kin), h1, l1, total, abs(h1 + l1 - total))


def hessian_matrix(
    params: ParticleParams,
    vel: ExtendedVelocity,
    q,
    t: float,
    field: FieldConfig | None = None,
    h: float = 1e-3,
    form: str = "mixed",
) -> np.ndarray:
    """Finite-difference Hessian of ``L1`` in the four-velocity ``u^mu = dq^mu/ds``.

    ``form="contravariant"`` returns ``d^2 L1 / du^mu du^nu``; ``form="mixed"``
    raises the second index with the metric, ``d^2 L1 / du^mu du_nu``.
    """
    c = params.c
    u0 = vel.four_velocity(c)

    def L(u):
        return extended_lagrangian_em(params, ExtendedVelocity(u[1:], u[0] / c), q, t, field)

    H = np.empty((4, 4))
    for i in range(4):
        for j in range(i, 4):
            vals = []
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                u = u0.copy()
                u[i] += si * h
                u[j] += sj * h
                vals.append(L(u))
            H[i, j] = H[j, i] = (vals[0] - vals[1] - vals[2] + vals[3]) / (4.0 * h * h)
    if form == "contravariant":
        return H
    if form == "mixed":
        return H @ np.linalg.inv(METRIC)
    raise ValueError(f"unknown Hessian form {form!r}")


def hessian_determinant(
    params: ParticleParams,
    vel: ExtendedVelocity,
    q,
    t: float,
    field: FieldConfig | None = None,
    h: float = 1e-3,
    form: str = "mixed",
) -> float:
    """Determinant of :func:`hessian_matrix`; ``m^4`` in mixed form, ``-m^4`` all-contravariant."""
    return float(np.linalg.det(hessian_matrix(params, vel, q, t, field, h, form)))


def constraint_residuals(
    params: ParticleParams,
    point: ExtendedPhasePoint,
    field: FieldConfig | None = None,
    vel: ExtendedVelocity | None = None,
) -> ConstraintReport:
    """Velocity and energy constraint residuals plus the ``H1`` value.

    Without an explicit velocity the canonical one is used:
    ``dq/ds = (p - zeta A/c)/m``, ``dt/ds = (e - zeta phi)/(m c^2)``.
    """
    k, ek = kinetic_momentum(params, point, field)
    m, c = params.m, params.c
    mc2 = m * c**2
    if vel is None:
        vel = ExtendedVelocity(k / m, ek / mc2)
    u = vel.dq_ds
    res_v = vel.dt_ds**2 - float(u @ u) / c**2 - 1.0
    res_e = (ek * ek - c**2 * float(k @ k) - mc2 * mc2) / (mc2 * mc2)
    h1 = (float(k @ k) - (ek / c) ** 2) / (2.0 * m) + 0.5 * mc2
    return ConstraintReport(float(res_v), float(res_e), float(h1))


def point_from_velocity(
    params: ParticleParams, q0, v0, t0: float = 0.0, field: FieldConfig | None = None, s0: float = 0.0
) -> ExtendedPhasePoint:
    """On-shell point from position and 3-velocity; ``p`` and ``e`` are completed from the constraint."""
    vel = ExtendedVelocity.on_shell(v0, params.c)
    pot = eval_potentials(_field(field), q0, t0)
    m, c, z = params.m, params.c, params.zeta
    p = m * vel.dq_ds + (z / c) * pot.A
    e = m * c**2 * vel.dt_ds + z * pot.phi
    return ExtendedPhasePoint(s0, t0, e, q0, p, on_constraint=True)


def point_from_momentum(
    params: ParticleParams,
    q0,
    p0,
    t0: float = 0.0,
    e0: float | None = None,
    field: FieldConfig | None = None,
    s0: float = 0.0,
    tol: float = 1e-9,
) -> ExtendedPhasePoint:
    """Point from canonical ``(q, p)``; ``e`` is completed on the forward branch or checked if given."""
    field = _field(field)
    if e0 is None:
        e0 = conventional_hamiltonian_em(params, q0, p0, t0, field)
    point = ExtendedPhasePoint(s0, t0, e0, q0, p0)
    rep = constraint_residuals(params, point, field)
    if abs(rep.energy_constraint_residual) > tol:
        raise DomainError(
            f"initial point is off the constraint surface (normalized residual {rep.energy_constraint_residual:.3g})"
        )
    return ExtendedPhasePoint(s0, t0, e0, q0, p0, on_constraint=True)


@dataclass(frozen=True)
class ConventionalHamiltonian:
    """Conventional Hamiltonian ``H(q, p, t)`` with optional analytic gradients.

    ``gradients(q, p, t)`` returns ``(dH/dq, dH/dp, dH/dt)``. When it is not
    supplied the gradients are taken by central differences with step ``h``.
    """

    value: Callable[[np.ndarray, np.ndarray, float], float]
    gradients: Callable | None = None
    h: float = 1e-6

    def __call__(self, q, p, t) -> float:
        return float(self.value(q, p, t))

    def grad(self, q, p, t):
        if self.gradients is not None:
            return self.gradients(q, p, t)
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        gq = np.empty(3)
        gp = np.empty(3)
        for i in range(3):
            d = np.zeros(3)
            d[i] = self.h
            gq[i] = (self.value(q + d, p, t) - self.value(q - d, p, t)) / (2 * self.h)
            gp[i] = (self.value(q, p + d, t) - self.value(q, p - d, t)) / (2 * self.h)
        gt = (self.value(q, p, t + self.h) - self.value(q, p, t - self.h)) / (2 * self.h)
        return gq, gp, gt


def em_hamiltonian(params: ParticleParams, field: FieldConfig | None = None) -> ConventionalHamiltonian:
    """``H = W + zeta phi`` with ``W = sqrt(c^2 k^2 + m^2 c^4)``, analytic gradients included."""
    from ..fields import potential_kernel

    pk = potential_kernel(_field(field))
    m, c, z = params.m, params.c, params.zeta

    def value(q, p, t):
        phi, A, *_ = pk(np.asarray(q, dtype=float), t)
        k = np.asarray(p, dtype=float) - (z / c) * A
        return math.sqrt(c * c * float(k @ k) + (m * c * c) ** 2) + z * phi

    def gradients(q, p, t):
        phi, A, gphi, dphit, dAq, dAt = pk(np.asarray(q, dtype=float), t)
        k = np.asarray(p, dtype=float) - (z / c) * A
        W = math.sqrt(c * c * float(k @ k) + (m * c * c) ** 2)
        dHdp = c * c * k / W
        dHdq = -(z * c / W) * (dAq.T @ k) + z * gphi
        dHdt = -(z * c / W) * float(k @ dAt) + z * dphit
        return dHdq, dHdp, dHdt

    return ConventionalHamiltonian(value, gradients)


def hj_residual(
    params: ParticleParams,
    S: Callable[[np.ndarray, float], float],
    q,
    t: float,
    field: FieldConfig | None = None,
    h: float = 1e-5,
) -> float:
    """``H(q, grad S, t) + dS/dt`` with central-difference derivatives of ``S``.

    Raises :class:`HJDomainError` when ``S`` leaves its real domain on the
    stencil (for instance a square root of a negative number).
    """
    q = _vec3(q, "q")
    t = float(t)

    def Sv(qq, tt):
        try:
            with np.errstate(invalid="raise", divide="raise"):
                val = float(S(qq, tt))
        except (ValueError, FloatingPointError, ZeroDivisionError) as exc:
            raise HJDomainError(f"action function undefined near q={qq.tolist()}, t={tt!r}: {exc}") from exc
        if not math.isfinite(val):
            raise HJDomainError(f"action function is not finite near q={qq.tolist()}, t={tt!r}")
        return val

    grad = np.empty(3)
    for i in range(3):
        d = np.zeros(3)
        d[i] = h
        grad[i] = (Sv(q + d, t) - Sv(q - d, t)) / (2.0 * h)
    dSdt = (Sv(q, t + h) - Sv(q, t - h)) / (2.0 * h)
    return conventional_hamiltonian_em(params, q, grad, t, field) + dSdt


def free_particle_hj_action(params: ParticleParams) -> Callable[[np.ndarray, float], float]:
    """``S(q, t) = -m c^2 sqrt(t^2 - q^2/c^2)`` (defined inside the forward light cone)."""
    m, c = params.m, params.c

    def S(q, t):
        q = np.asarray(q, dtype=float)
        return -m * c**2 * math.sqrt(t * t - float(q @ q) / c**2)

    return S
