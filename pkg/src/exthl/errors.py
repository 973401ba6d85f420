"""Exception hierarchy shared by all modules."""


class ExthlError(Exception):
    """Base class for library errors."""


class DomainError(ExthlError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class HJDomainError(DomainError):
    """The trial action function left its real domain (e.g. a square root went negative)."""


class UnsupportedSeparationError(DomainError):
    """A space-time separation is light-like or space-like where a time-like one is required."""


class GridIndexError(ExthlError, IndexError):
    """A stencil was requested too close to the boundary of a grid."""


class IntegrationError(ExthlError, RuntimeError):
    """The ODE integrator failed (step budget exhausted or non-finite right-hand side)."""


class QuadratureError(ExthlError, RuntimeError):
    """Adaptive quadrature did not converge or the truncation window lost significant mass."""


class ConfigError(ExthlError):
    """A scenario configuration failed validation."""
