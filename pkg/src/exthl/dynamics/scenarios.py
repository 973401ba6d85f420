"""Reference scenarios with closed-form oracles: free motion, cyclotron
orbit in a uniform magnetic field and hyperbolic motion in a uniform
electric field.

The characteristic period in ``s`` is the Compton period ``2 pi hbar/(m c^2)``
for the free and electric cases (neither has an intrinsic period) and the
proper-time cyclotron period ``2 pi m c/(zeta B)`` in the magnetic case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..fields import FieldConfig
from .functionals import point_from_velocity
from .state import ExtendedPhasePoint, ParticleParams

__all__ = [
    "Scenario",
    "free_scenario",
    "cyclotron_scenario",
    "cyclotron_oracle",
    "hyperbolic_scenario",
    "hyperbolic_oracle",
    "reference_scenarios",
]


@dataclass(frozen=True)
class Scenario:
    name: str
    params: ParticleParams
    field: FieldConfig
    point0: ExtendedPhasePoint
    period_s: float

    def span(self, n_periods: float = 100.0) -> tuple[float, float]:
        return (self.point0.s, self.point0.s + n_periods * self.period_s)


def free_scenario(params: ParticleParams | None = None, v=(0.5, -0.3, 0.2)) -> Scenario:
    params = params or ParticleParams()
    v = np.asarray(v, dtype=float) * params.c
    point = point_from_velocity(params, (0.0, 0.0, 0.0), v, 0.0, FieldConfig.zero())
    return Scenario("free", params, FieldConfig.zero(), point, params.compton_period)


def cyclotron_scenario(params: ParticleParams | None = None, B: float = 1.0, speed: float = 0.9) -> Scenario:
    """Orbit centred on the origin in the plane normal to ``B z``, starting at ``(R, 0, 0)``.

    For ``zeta B > 0`` the motion is clockwise seen from ``+z``:
    ``x = R cos(w t)``, ``y = -R sin(w t)``.
    """
    params = params or ParticleParams()
    field = FieldConfig.uniform_magnetic((0.0, 0.0, B))
    v = speed * params.c
    g = 1.0 / math.sqrt(1.0 - speed**2)
    R = g * params.m * v * params.c / abs(params.zeta * B)
    sense = 1.0 if params.zeta * B > 0 else -1.0
    point = point_from_velocity(params, (R, 0.0, 0.0), (0.0, -sense * v, 0.0), 0.0, field)
    period = 2.0 * math.pi * params.m * params.c / abs(params.zeta * B)
    return Scenario("uniform-B", params, field, point, period)


def cyclotron_oracle(sc: Scenario, t) -> np.ndarray:
    """Closed-form orbit ``q(t)`` for :func:`cyclotron_scenario`."""
    p = sc.params
    B = float(sc.field.params["B"][2])
    k0 = sc.point0.p - (p.zeta / p.c) * 0.5 * np.cross(sc.field.params["B"], sc.point0.q)
    g = math.sqrt(1.0 + float(k0 @ k0) / (p.m * p.c) ** 2)
    w = p.zeta * B / (g * p.m * p.c)
    R = sc.point0.q[0]
    t = np.asarray(t, dtype=float)
    return np.stack([R * np.cos(w * t), -R * np.sin(w * t), np.zeros_like(t)], axis=-1)


def hyperbolic_scenario(params: ParticleParams | None = None, E: float = 0.01) -> Scenario:
    """Particle released from rest at the origin in ``E x``."""
    params = params or ParticleParams()
    field = FieldConfig.uniform_electric((E, 0.0, 0.0))
    point = point_from_velocity(params, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), 0.0, field)
    return Scenario("uniform-E", params, field, point, params.compton_period)


def hyperbolic_oracle(sc: Scenario, s) -> tuple[np.ndarray, np.ndarray]:
    """``x(s) = (c^2/a)(cosh(a s/c) - 1)`` and ``t(s) = (c/a) sinh(a s/c)`` with ``a = zeta E/m``."""
    p = sc.params
    a = p.zeta * float(sc.field.params["E"][0]) / p.m
    s = np.asarray(s, dtype=float) - sc.point0.s
    # cosh(u) - 1 = 2 sinh^2(u/2) avoids cancellation at small u
    x = (2.0 * p.c**2 / a) * np.sinh(0.5 * a * s / p.c) ** 2
    t = (p.c / a) * np.sinh(a * s / p.c)
    return x, t


def reference_scenarios(params: ParticleParams | None = None) -> list[Scenario]:
    return [free_scenario(params), cyclotron_scenario(params), hyperbolic_scenario(params)]
