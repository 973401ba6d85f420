"""Tolerance/budget records for the ODE integrator and the damped quadrature."""
from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

from ..errors import DomainError


@dataclass(frozen=True)
class OdeSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_step: float = math.inf
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("ODE tolerances must be positive")
        if not self.max_step > 0:
            raise DomainError("max_step must be positive")
        if self.max_steps < 1:
            raise DomainError("max_steps must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class QuadratureSpec:
    """Damping strength and truncation window for semi-infinite quadrature.

    ``eps_reg`` is the damping rate; ``sigma_min``/``sigma_max`` bound the
    window actually integrated. ``rel_tol`` and ``max_evals`` control the
    adaptive panel refinement.
    """

    eps_reg: float = 0.05
    sigma_min: float = 1e-12
    sigma_max: float = 1e4
    rel_tol: float = 1e-10
    max_evals: int = 5_000_000

    def __post_init__(self):
        if not self.eps_reg > 0:
            raise DomainError("eps_reg must be positive")
        if not (0 < self.sigma_min < self.sigma_max):
            raise DomainError("need 0 < sigma_min < sigma_max")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_evals < 15:
            raise DomainError("max_evals too small")

    def to_dict(self) -> dict:
        return asdict(self)


def finite_complex(value) -> complex:
    """Coerce to ``complex`` and reject NaN or infinite components."""
    z = complex(value)
    if not cmath.isfinite(z):
        raise DomainError(f"non-finite complex value {z!r}")
    return z
