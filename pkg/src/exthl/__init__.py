"""Extended Hamilton-Lagrange mechanics of a charged relativistic particle and
the parameterized path-integral propagator built on it."""
from . import dynamics, fields, minkowski, numerics, propagator
from .dynamics.state import ExtendedPhasePoint, ExtendedVelocity, ParticleParams
from .errors import (
    ConfigError,
    DomainError,
    ExthlError,
    GridIndexError,
    HJDomainError,
    IntegrationError,
    QuadratureError,
    UnsupportedSeparationError,
)
from .fields import FieldConfig

__version__ = "0.1.0"

__all__ = [
    "dynamics", "fields", "minkowski", "numerics", "propagator",
    "ExtendedPhasePoint", "ExtendedVelocity", "ParticleParams", "FieldConfig",
    "ConfigError", "DomainError", "ExthlError", "GridIndexError", "HJDomainError",
    "IntegrationError", "QuadratureError", "UnsupportedSeparationError",
    "__version__",
]
