"""Particle parameters and extended phase-space records."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class ParticleParams:
    """Mass ``m``, charge ``zeta``, light speed ``c`` and action quantum ``hbar``.

    Defaults are natural units.
    """

    m: float = 1.0
    zeta: float = 1.0
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "c", "hbar"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite number, got {v!r}")
            object.__setattr__(self, name, v)
        z = float(self.zeta)
        if not math.isfinite(z):
            raise DomainError("zeta must be finite")
        object.__setattr__(self, "zeta", z)

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    @property
    def compton_period(self) -> float:
        """``2 pi hbar / (m c^2)``, the phase period of the rest-energy factor."""
        return 2.0 * math.pi * self.hbar / self.rest_energy

    def to_dict(self) -> dict:
        return asdict(self)


def _vec3(v, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise DomainError(f"{name} must be a 3-vector")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    return a


@dataclass(frozen=True)
class ExtendedVelocity:
    """Derivatives ``dq/ds`` (3-vector) and ``dt/ds`` with respect to the evolution parameter."""

    dq_ds: np.ndarray
    dt_ds: float

    def __post_init__(self):
        object.__setattr__(self, "dq_ds", _vec3(self.dq_ds, "dq/ds"))
        v = float(self.dt_ds)
        if not math.isfinite(v):
            raise DomainError("dt/ds must be finite")
        object.__setattr__(self, "dt_ds", v)

    @classmethod
    def on_shell(cls, v, c: float = 1.0) -> "ExtendedVelocity":
        """``(gamma v, gamma)`` for a 3-velocity ``v`` with ``|v| < c``."""
        v = _vec3(v, "v")
        b2 = float(v @ v) / c**2
        if b2 >= 1.0:
            raise DomainError("|v| must be below c")
        g = 1.0 / math.sqrt(1.0 - b2)
        return cls(g * v, g)

    def four_velocity(self, c: float = 1.0) -> np.ndarray:
        """Contravariant ``dq^mu/ds`` with ``q^0 = ct``."""
        return np.concatenate([[c * self.dt_ds], self.dq_ds])


@dataclass(frozen=True)
class ExtendedPhasePoint:
    """State ``(t, e, q, p)`` at evolution parameter ``s``.

    ``e`` is the variable conjugate to ``t`` (its on-shell value is the
    conventional Hamiltonian); ``p`` is the canonical momentum.
    """

    s: float
    t: float
    e: float
    q: np.ndarray
    p: np.ndarray
    on_constraint: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("s", "t", "e"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "q", _vec3(self.q, "q"))
        object.__setattr__(self, "p", _vec3(self.p, "p"))

    def state_vector(self) -> np.ndarray:
        """ODE state layout ``[t, e, q1, q2, q3, p1, p2, p3]``."""
        return np.concatenate([[self.t, self.e], self.q, self.p])

    @classmethod
    def from_state(cls, s: float, y, on_constraint: bool = False) -> "ExtendedPhasePoint":
        y = np.asarray(y, dtype=float)
        return cls(s, y[0], y[1], y[2:5], y[5:8], on_constraint)

    def canonical_coordinates(self, c: float = 1.0) -> np.ndarray:
        """Packed ``(q^0, q^1, q^2, q^3, p_0, p_1, p_2, p_3)`` with ``q^0 = ct``, ``p_0 = -e/c``."""
        return np.concatenate([[c * self.t], self.q, [-self.e / c], self.p])

    @classmethod
    def from_canonical(cls, z, s: float = 0.0, c: float = 1.0) -> "ExtendedPhasePoint":
        z = np.asarray(z, dtype=float)
        return cls(s, z[0] / c, -c * z[4], z[1:4], z[5:8])

    def to_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "e": self.e, "q": self.q.tolist(), "p": self.p.tolist()}


@dataclass(frozen=True)
class ConstraintReport:
    """Constraint diagnostics at one sample.

    ``velocity_constraint_residual`` is ``(dt/ds)^2 - (dq/ds)^2/c^2 - 1``;
    ``energy_constraint_residual`` is
    ``[(e - zeta phi)^2 - c^2 (p - zeta A/c)^2 - m^2 c^4] / (m^2 c^4)``;
    ``h1_value`` is the extended Hamiltonian ``e1``.
    """

    velocity_constraint_residual: float
    energy_constraint_residual: float
    h1_value: float

    def max_abs(self) -> float:
        return max(abs(self.velocity_constraint_residual), abs(self.energy_constraint_residual))

    def to_dict(self) -> dict:
        return asdict(self)
