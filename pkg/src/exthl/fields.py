"""Electromagnetic potential providers with analytic first derivatives.

Every provider returns the scalar potential ``phi``, the vector potential
``A`` and their first derivatives in space and time. The covariant
time component is ``A_0 = -phi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .minkowski import FourVector

__all__ = [
    "FIELD_KINDS",
    "FieldConfig",
    "PotentialSample",
    "PotentialArrays",
    "eval_potentials",
    "eval_potentials_many",
    "covariant_potential",
    "potential_kernel",
]

FIELD_KINDS = ("zero", "uniform-electric", "uniform-magnetic", "plane-wave", "coulomb")


def _vec3(v, name) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be a finite 3-vector")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FieldConfig:
    """Field kind plus its parameter payload.

    Use the named constructors (:meth:`zero`, :meth:`uniform_electric`,
    :meth:`uniform_magnetic`, :meth:`plane_wave`, :meth:`coulomb`).
    """

    kind: str = "zero"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise DomainError(f"unknown field kind {self.kind!r}; expected one of {FIELD_KINDS}")
        p = dict(self.params)
        if self.kind == "uniform-electric":
            p = {"E": _vec3(p.get("E", (0, 0, 0)), "E")}
        elif self.kind == "uniform-magnetic":
            p = {"B": _vec3(p.get("B", (0, 0, 0)), "B")}
        elif self.kind == "plane-wave":
            a = _vec3(p.get("amplitude", (0, 0, 0)), "amplitude")
            k = _vec3(p.get("wave_vector", (0, 0, 1)), "wave_vector")
            phase = float(p.get("phase", 0.0))
            c = float(p.get("c", 1.0))
            if not (math.isfinite(phase) and c > 0):
                raise DomainError("plane wave needs a finite phase and c > 0")
            if not float(k @ k) > 0:
                raise DomainError("plane wave needs a non-zero wave vector")
            if abs(float(a @ k)) > 1e-12 * (np.linalg.norm(a) * np.linalg.norm(k) + 1e-300):
                raise DomainError("plane-wave amplitude must be transverse to the wave vector")
            p = {"amplitude": a, "wave_vector": k, "phase": phase, "c": c}
        elif self.kind == "coulomb":
            strength = float(p.get("strength", 0.0))
            soft = float(p.get("softening", 0.0))
            if not (math.isfinite(strength) and math.isfinite(soft)) or soft < 0:
                raise DomainError("coulomb needs finite strength and softening >= 0")
            p = {"strength": strength, "softening": soft}
        else:
            p = {}
        object.__setattr__(self, "params", p)

    # named constructors
    @classmethod
    def zero(cls) -> "FieldConfig":
        return cls("zero")

    @classmethod
    def uniform_electric(cls, E) -> "FieldConfig":
        return cls("uniform-electric", {"E": E})

    @classmethod
    def uniform_magnetic(cls, B) -> "FieldConfig":
        return cls("uniform-magnetic", {"B": B})

    @classmethod
    def plane_wave(cls, amplitude, wave_vector, phase: float = 0.0, c: float = 1.0) -> "FieldConfig":
        return cls("plane-wave", {"amplitude": amplitude, "wave_vector": wave_vector, "phase": phase, "c": c})

    @classmethod
    def coulomb(cls, strength: float, softening: float = 0.0) -> "FieldConfig":
        return cls("coulomb", {"strength": strength, "softening": softening})

    @property
    def is_static(self) -> bool:
        return self.kind != "plane-wave"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(repr(sorted(self.to_dict().items())))

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for k, v in self.params.items():
            out[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "FieldConfig":
        d = dict(d)
        kind = d.pop("kind", "zero")
        return cls(kind, d)


@dataclass(frozen=True)
class PotentialSample:
    """Potentials and first derivatives at one event.

    ``dA_dq[i, j]`` is ``dA_i/dq_j``.
    """

    phi: float
    A: np.ndarray
    grad_phi: np.ndarray
    dphi_dt: float
    dA_dq: np.ndarray
    dA_dt: np.ndarray


@dataclass(frozen=True)
class PotentialArrays:
    """Vectorized counterpart of :class:`PotentialSample` over ``n`` events."""

    phi: np.ndarray       # (n,)
    A: np.ndarray         # (n, 3)
    grad_phi: np.ndarray  # (n, 3)
    dphi_dt: np.ndarray   # (n,)
    dA_dq: np.ndarray     # (n, 3, 3)
    dA_dt: np.ndarray     # (n, 3)

    def sample(self, i: int) -> PotentialSample:
        return PotentialSample(
            float(self.phi[i]), self.A[i], self.grad_phi[i], float(self.dphi_dt[i]), self.dA_dq[i], self.dA_dt[i]
        )


def eval_potentials_many(config: FieldConfig, q, t) -> PotentialArrays:
    """Evaluate potentials at ``q`` of shape ``(n, 3)`` and ``t`` of shape ``(n,)``."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    t = np.broadcast_to(np.asarray(t, dtype=float), (q.shape[0],))
    n = q.shape[0]
    phi = np.zeros(n)
    A = np.zeros((n, 3))
    grad_phi = np.zeros((n, 3))
    dphi_dt = np.zeros(n)
    dA_dq = np.zeros((n, 3, 3))
    dA_dt = np.zeros((n, 3))
    p = config.params

    if config.kind == "uniform-electric":
        E = p["E"]
        phi = -(q @ E)
        grad_phi[:] = -E
    elif config.kind == "uniform-magnetic":
        B = p["B"]
        A = 0.5 * np.cross(B, q)
        # column j of dA/dq is (1/2) B x e_j
        dA_dq[:] = 0.5 * np.cross(B, np.eye(3)).T
    elif config.kind == "plane-wave":
        a, k, c = p["amplitude"], p["wave_vector"], p["c"]
        omega = c * math.sqrt(float(k @ k))
        arg = q @ k - omega * t + p["phase"]
        cs, sn = np.cos(arg), np.sin(arg)
        A = cs[:, None] * a
        dA_dq = -sn[:, None, None] * np.outer(a, k)[None]
        dA_dt = (omega * sn)[:, None] * a
    elif config.kind == "coulomb":
        strength, soft = p["strength"], p["softening"]
        r2 = np.einsum("ij,ij->i", q, q) + soft * soft
        if np.any(r2 <= 0.0):
            raise DomainError("coulomb potential evaluated at its singularity (|q| = 0 with zero softening)")
        inv_r = 1.0 / np.sqrt(r2)
        phi = strength * inv_r
        grad_phi = -strength * (inv_r**3)[:, None] * q
    return PotentialArrays(phi, A, grad_phi, dphi_dt, dA_dq, dA_dt)


def eval_potentials(config: FieldConfig, q, t: float) -> PotentialSample:
    """Potentials and analytic derivatives at ``(q, t)``.

    >>> s = eval_potentials(FieldConfig.uniform_magnetic((0, 0, 2.0)), (1.0, 0, 0), 0.0)
    >>> s.A.tolist(), s.dA_dq[1, 0]
    ([0.0, 1.0, 0.0], 1.0)
    """
    qq = np.asarray(q, dtype=float).reshape(1, 3)
    if not np.all(np.isfinite(qq)) or not math.isfinite(float(t)):
        raise DomainError("event coordinates must be finite")
    return eval_potentials_many(config, qq, np.array([float(t)])).sample(0)


def covariant_potential(config: FieldConfig, q, t: float) -> FourVector:
    """``(A_0, A_1, A_2, A_3)`` with ``A_0 = -phi``."""
    s = eval_potentials(config, q, t)
    return FourVector(-s.phi, *s.A.tolist())


def potential_kernel(config: FieldConfig):
    """Low-overhead evaluator ``f(q, t) -> (phi, A, grad_phi, dphi_dt, dA_dq, dA_dt)``.

    Intended for ODE right-hand sides, where constructing a
    :class:`PotentialSample` per call would dominate the cost. The returned
    arrays must not be mutated.
    """
    zero3 = np.zeros(3)
    zero33 = np.zeros((3, 3))
    p = config.params
    if config.kind == "zero":
        return lambda q, t: (0.0, zero3, zero3, 0.0, zero33, zero3)
    if config.kind == "uniform-electric":
        E = p["E"]
        grad = -E
        return lambda q, t: (-float(q @ E), zero3, grad, 0.0, zero33, zero3)
    if config.kind == "uniform-magnetic":
        B = p["B"]
        jac = 0.5 * np.cross(B, np.eye(3)).T

        def magnetic(q, t):
            return 0.0, jac @ q, zero3, 0.0, jac, zero3

        return magnetic
    if config.kind == "plane-wave":
        a, k, phase = p["amplitude"], p["wave_vector"], p["phase"]
        omega = p["c"] * math.sqrt(float(k @ k))
        ak = np.outer(a, k)

        def wave(q, t):
            arg = float(q @ k) - omega * t + phase
            sn = math.sin(arg)
            return 0.0, math.cos(arg) * a, zero3, 0.0, -sn * ak, (omega * sn) * a

        return wave
    strength, soft = p["strength"], p["softening"]

    def coulomb(q, t):
        r2 = float(q @ q) + soft * soft
        if r2 <= 0.0:
            raise DomainError("coulomb potential evaluated at its singularity (|q| = 0 with zero softening)")
        inv_r = 1.0 / math.sqrt(r2)
        return strength * inv_r, zero3, (-strength * inv_r**3) * q, 0.0, zero33, zero3

    return coulomb
