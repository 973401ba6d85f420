"""Parameterized free-particle kernels and the sigma-integrated propagator.

Per degree of freedom the kernel over a parameter span ``sigma`` is the
Gaussian ``sqrt(m/(2 pi i hbar sigma)) exp[(i/hbar)(m/2) dq^2/sigma]``. The
space-time kernel is the product over the four coordinates together with
the rest-energy phase ``exp(-i m c^2 sigma/(2 hbar))``; integrating it over
``sigma > 0`` gives a Hankel function of the proper time ``tau``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..dynamics.state import ParticleParams
from ..errors import DomainError, UnsupportedSeparationError
from ..numerics.bessel import hankel2_1
from ..numerics.quadrature import (
    damped_semiinfinite_quadrature,
    gauss_kronrod_adaptive,
    richardson_to_zero,
)
from ..numerics.specs import QuadratureSpec, finite_complex

__all__ = [
    "SpacetimeSeparation",
    "KernelValue",
    "KernelComparison",
    "kernel_sigma_slice",
    "kernel_sigma_free",
    "kernel_closed_form",
    "hankel_sigma_integral",
    "kernel_free",
    "compose_slices",
    "lattice_kernel",
    "DEFAULT_DAMPING_LADDER",
]

# successive damping strengths relative to the largest one
DEFAULT_DAMPING_LADDER = (1.0, 0.5, 0.25, 0.125)
# window edges sit where the damping factor has fallen to exp(-_WINDOW_DECAY)
_WINDOW_DECAY = 45.0


@dataclass(frozen=True)
class SpacetimeSeparation:
    """Event separation ``(dq, dt)``; ``tau^2 = dt^2 - dq^2/c^2``."""

    dq: np.ndarray
    dt: float
    c: float = 1.0

    def __post_init__(self):
        dq = np.asarray(self.dq, dtype=float).reshape(-1)
        if dq.shape != (3,) or not np.all(np.isfinite(dq)) or not math.isfinite(float(self.dt)):
            raise DomainError("separation needs a finite 3-vector dq and finite dt")
        if not self.c > 0:
            raise DomainError("c must be positive")
        object.__setattr__(self, "dq", dq)
        object.__setattr__(self, "dt", float(self.dt))

    @classmethod
    def between(cls, event_a, event_b, c: float = 1.0) -> "SpacetimeSeparation":
        """From events given as ``(t, q)`` pairs."""
        ta, qa = event_a
        tb, qb = event_b
        return cls(np.asarray(qb, dtype=float) - np.asarray(qa, dtype=float), float(tb) - float(ta), c)

    @property
    def tau2(self) -> float:
        return self.dt * self.dt - float(self.dq @ self.dq) / (self.c * self.c)

    @property
    def classification(self) -> str:
        t2 = self.tau2
        if t2 > 0:
            return "timelike"
        if t2 < 0:
            return "spacelike"
        return "lightlike"

    @property
    def tau(self) -> float:
        """Proper-time separation; only defined for timelike separations."""
        if self.tau2 <= 0:
            raise UnsupportedSeparationError(
                f"{self.classification} separation (tau^2 = {self.tau2:.17g}); a time-like one is required"
            )
        return math.sqrt(self.tau2)


@dataclass(frozen=True)
class KernelValue:
    """Kernel amplitude with its ``sigma`` (a number or ``"integrated"``) and ``tau``."""

    amplitude: complex
    sigma: float | str
    tau: float
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "amplitude", finite_complex(self.amplitude))


@dataclass(frozen=True)
class KernelComparison:
    """Closed-form and quadrature values of the integrated kernel."""

    closed_form: KernelValue
    quadrature: KernelValue
    discrepancy: float
    damped_values: tuple
    damping: tuple

    def to_row(self) -> tuple:
        a, b = self.closed_form.amplitude, self.quadrature.amplitude
        return (self.closed_form.tau, a.real, a.imag, b.real, b.imag, self.discrepancy)


def _check_sigma(sigma: float):
    if not (math.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma must be positive and finite, got {sigma!r}")


def kernel_sigma_slice(
    params: ParticleParams, qa: float, qb: float, sigma: float, timelike: bool = False
) -> complex:
    """One-coordinate kernel ``sqrt(m/(2 pi i hbar sigma)) exp[(i/hbar)(m/2)(qb - qa)^2/sigma]``.

    The square root takes the principal branch, phase ``exp(-i pi/4)``.
    With ``timelike=True`` the coordinate is ``q^0 = ct`` and the exponent
    carries the metric sign ``-1``; the prefactor is kept unchanged so the
    four factors multiply to ``-(m/(2 pi hbar sigma))^2``.
    """
    sigma = float(sigma)
    _check_sigma(sigma)
    m, hbar = params.m, params.hbar
    pref = cmath.sqrt(m / (2j * math.pi * hbar * sigma))
    dq2 = (float(qb) - float(qa)) ** 2
    sign = -1.0 if timelike else 1.0
    return pref * cmath.exp(1j * sign * 0.5 * m * dq2 / (hbar * sigma))


def kernel_sigma_free(params: ParticleParams, sep: SpacetimeSeparation, sigma: float) -> KernelValue:
    """``-(m^2 c)/(4 pi^2 hbar^2 sigma^2) exp[-(i/hbar)(m c^2/2)(tau^2/sigma + sigma)]``."""
    sigma = float(sigma)
    _check_sigma(sigma)
    m, c, hbar = params.m, params.c, params.hbar
    amp = -(m * m * c) / (4.0 * math.pi**2 * hbar**2 * sigma**2) * cmath.exp(
        -1j * 0.5 * m * c * c * (sep.tau2 / sigma + sigma) / hbar
    )
    tau = math.sqrt(sep.tau2) if sep.tau2 > 0 else float("nan")
    return KernelValue(amp, sigma, tau if math.isfinite(tau) else 0.0)


def kernel_closed_form(params: ParticleParams, tau, N: float = 1.0):
    """``(m^2 c)/(4 pi hbar^2 N) tau^-1 H1^(2)(m c^2 tau/hbar)`` (vectorized over ``tau > 0``)."""
    m, c, hbar = params.m, params.c, params.hbar
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(~(tau_arr > 0)):
        raise UnsupportedSeparationError("closed-form kernel needs tau > 0 (time-like separation)")
    return (m * m * c) / (4.0 * math.pi * hbar**2 * N) * hankel2_1(m * c * c * tau_arr / hbar) / tau_arr


def hankel_sigma_integral(
    x: float,
    deltas: Sequence[float] = tuple(0.05 * f for f in DEFAULT_DAMPING_LADDER),
    rel_tol: float = 1e-11,
    max_evals: int = 5_000_000,
) -> tuple[complex, list[complex]]:
    """``J(x) = int_0^inf u^-2 exp[-(i x/2)(u + 1/u)] du`` by damped quadrature.

    Each damped value multiplies the integrand by ``exp[-(delta/2)(u + 1/u)]``,
    which is the shift ``x -> x - i delta`` and tames both ends. The
    values are extrapolated to ``delta -> 0`` with the polynomial through all
    points. The exact value is ``-pi H1^(2)(x)``.
    """
    if not (math.isfinite(x) and x > 0):
        raise DomainError("x must be positive")

    def integrand(u):
        return np.exp(-0.5j * x * (u + 1.0 / u)) / (u * u)

    def damping(u, d):
        return np.exp(-0.5 * d * (u + 1.0 / u))

    raw = []
    for d in deltas:
        spec = QuadratureSpec(
            eps_reg=d,
            sigma_min=d / (2.0 * _WINDOW_DECAY),
            sigma_max=2.0 * _WINDOW_DECAY / d,
            rel_tol=rel_tol,
            max_evals=max_evals,
        )
        raw.append(damped_semiinfinite_quadrature(integrand, spec, damping))
    return richardson_to_zero(deltas, raw), raw


def kernel_free(
    params: ParticleParams,
    sep: SpacetimeSeparation,
    N: float = 1.0,
    spec: QuadratureSpec | None = None,
    ladder: Sequence[float] = DEFAULT_DAMPING_LADDER,
) -> KernelComparison:
    """Integrated kernel by sigma-quadrature and by the Hankel closed form.

    The regularization ``z = m c^2/hbar - i eps`` is applied with
    ``eps = delta/tau`` for ``delta`` in ``spec.eps_reg * ladder``; i.e. the
    damping is measured in units of ``hbar/(m c^2 tau)`` relative to ``z``.
    The truncation window is chosen per damping value so that the damped
    integrand has decayed by ``exp(-45)`` at both edges; only
    ``spec.eps_reg``, ``spec.rel_tol`` and ``spec.max_evals`` are used.
    """
    if sep.classification != "timelike":
        raise UnsupportedSeparationError(
            f"{sep.classification} separation (tau^2 = {sep.tau2:.17g}); the kernel is only defined for "
            "time-like connections"
        )
    spec = spec or QuadratureSpec(rel_tol=1e-11)
    if not N > 0:
        raise DomainError("N must be positive")
    tau = sep.tau
    m, c, hbar = params.m, params.c, params.hbar
    x = m * c * c * tau / hbar
    deltas = tuple(spec.eps_reg * f for f in ladder)
    J, raw = hankel_sigma_integral(x, deltas, spec.rel_tol, spec.max_evals)
    # int sigma^-2 exp(...) d sigma = J / tau after sigma = tau u
    pref = -(m * m * c) / (4.0 * math.pi**2 * hbar**2 * N)
    quad = pref * J / tau
    closed = complex(kernel_closed_form(params, tau, N))
    disc = abs(quad - closed) / abs(closed)
    return KernelComparison(
        KernelValue(closed, "integrated", tau, True),
        KernelValue(quad, "integrated", tau, True),
        float(disc),
        tuple(pref * r / tau for r in raw),
        deltas,
    )


def compose_slices(
    params: ParticleParams,
    qa: float,
    qb: float,
    sigma1: float,
    sigma2: float,
    eps_values: Sequence[float] = (0.04, 0.02, 0.01, 0.005),
    rel_tol: float = 1e-10,
) -> tuple[complex, list[complex]]:
    """``int K_sigma1(qa -> x) K_sigma2(x -> qb) dx`` with Gaussian damping ``exp(-eps x'^2)``.

    ``x'`` is measured from the midpoint of ``qa`` and ``qb``; each damped
    integral runs over the window where the damping exceeds ``exp(-45)`` and
    the results are extrapolated to ``eps -> 0``.
    """
    centre = 0.5 * (qa + qb)
    raw = []
    for eps in eps_values:
        half = math.sqrt(_WINDOW_DECAY / eps)

        def g(x, eps=eps):
            k1 = _slice_vec(params, qa, x, sigma1)
            k2 = _slice_vec(params, x, qb, sigma2)
            return k1 * k2 * np.exp(-eps * (x - centre) ** 2)

        val, _, _ = gauss_kronrod_adaptive(g, centre - half, centre + half, rel_tol=rel_tol, initial_panels=256)
        raw.append(val)
    return richardson_to_zero(eps_values, raw), raw


def _slice_vec(params: ParticleParams, qa, qb, sigma: float) -> np.ndarray:
    m, hbar = params.m, params.hbar
    pref = cmath.sqrt(m / (2j * math.pi * hbar * sigma))
    dq = np.asarray(qb, dtype=float) - np.asarray(qa, dtype=float)
    return pref * np.exp(1j * 0.5 * m * dq * dq / (hbar * sigma))


def lattice_kernel(
    params: ParticleParams,
    qa: float,
    qb: float,
    sigmas: Sequence[float],
    eps_values: Sequence[float] = (0.4, 0.2, 0.1, 0.05, 0.025),
    points_per_radian: float = 3.0,
) -> tuple[complex, list[complex]]:
    """Chain of ``len(sigmas)`` slice kernels with ``len(sigmas) - 1`` inner integrations.

    Each inner coordinate carries the damping ``exp(-eps x'^2)`` and is
    integrated with the trapezoidal rule on a uniform grid fine enough to
    resolve the oscillating phase; the chain is a product of kernel matrices.
    The result is extrapolated to ``eps -> 0``.
    """
    if len(sigmas) < 2:
        raise ValueError("need at least two slices")
    centre = 0.5 * (qa + qb)
    m, hbar = params.m, params.hbar
    raw = []
    for eps in eps_values:
        half = math.sqrt(_WINDOW_DECAY / eps)
        # largest phase gradient of a slice kernel on the window
        grad = m * (2.0 * half + abs(qb - qa)) / (hbar * min(sigmas))
        n = int(math.ceil(2.0 * half * grad * points_per_radian / (2.0 * math.pi))) | 1
        x = np.linspace(centre - half, centre + half, n)
        w = np.full(n, x[1] - x[0])
        w[0] = w[-1] = 0.5 * (x[1] - x[0])
        w = w * np.exp(-eps * (x - centre) ** 2)
        vec = _slice_vec(params, qa, x, sigmas[0]) * w
        for sig in sigmas[1:-1]:
            vec = (vec @ _slice_vec(params, x[:, None], x[None, :], sig)) * w
        raw.append(complex(vec @ _slice_vec(params, x, qb, sigmas[-1])))
    return richardson_to_zero(eps_values, raw), raw
