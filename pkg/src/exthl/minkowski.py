"""Four-vectors, Lorentz boosts as extended canonical transformations, and a
numerical canonical-map verifier.

Conventions: metric diag(-1, +1, +1, +1); contravariant coordinates
``q^0 = ct``; covariant momenta ``p_0 = -e/c``. An extended phase point is
packed as the 8-vector ``(q^0, q^1, q^2, q^3, p_0, p_1, p_2, p_3)``.

Boost orientation: the coordinate rule maps unprimed ``(q, ct)`` to primed
``(Q, cT)``; the momentum rule, as written, maps primed ``(P_k, E_k/c)`` to
unprimed ``(p_k, e_k/c)``. Both directions are exposed for each.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = [
    "METRIC",
    "FourVector",
    "BoostParams",
    "CanonicalMap",
    "CanonicalReport",
    "minkowski_dot",
    "boost_matrix",
    "boost_coordinates",
    "unboost_coordinates",
    "boost_momentum_energy",
    "boost_potentials",
    "boost_generating_function",
    "boost_generating_gradients",
    "boost_canonical_map",
    "identity_map",
    "scaling_map",
    "trivial_generating_map",
    "verify_extended_canonical",
    "hamiltonian_boost_rule",
    "compose_parallel_rapidity",
]

METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])


def _vec3(v, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise DomainError(f"{name} must be a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    return a


@dataclass(frozen=True)
class FourVector:
    """Components ``(x0, x1, x2, x3)``; ``x0`` is ``ct`` or ``e/c``."""

    x0: float
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        for name in ("x0", "x1", "x2", "x3"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"four-vector component {name} is not finite")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, a) -> "FourVector":
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape != (4,):
            raise DomainError(f"need 4 components, got {a.shape}")
        return cls(*a.tolist())

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def norm2(self) -> float:
        return minkowski_dot(self, self)


def _as4(a) -> np.ndarray:
    if isinstance(a, FourVector):
        return a.as_array()
    arr = np.asarray(a, dtype=float).reshape(-1)
    if arr.shape != (4,):
        raise DomainError(f"need 4 components, got {arr.shape}")
    return arr


def minkowski_dot(a, b) -> float:
    """``eta_ab a^a b^b`` with ``eta = diag(-1, +1, +1, +1)``."""
    return float(_as4(a) @ METRIC @ _as4(b))


@dataclass(frozen=True)
class BoostParams:
    """Boost velocity ``beta = v/c`` (3-vector, ``|beta| < 1``)."""

    beta: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        b = _vec3(self.beta, "beta")
        if float(b @ b) >= 1.0:
            raise DomainError(f"|beta| = {math.sqrt(float(b @ b)):.17g} must be < 1")
        b.setflags(write=False)
        object.__setattr__(self, "beta", b)

    @property
    def beta2(self) -> float:
        return float(self.beta @ self.beta)

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta2)

    @property
    def kappa(self) -> float:
        """``(gamma - 1)/beta^2`` in the cancellation-free form ``gamma^2/(gamma + 1)``."""
        g = self.gamma
        return g * g / (g + 1.0)

    def inverse(self) -> "BoostParams":
        return BoostParams(-self.beta)


def _block(b: BoostParams, off_sign: float) -> np.ndarray:
    """4x4 matrix acting on ``(x, y, z, w)`` with ``w`` the time-like slot."""
    g = b.gamma
    M = np.empty((4, 4))
    M[:3, :3] = np.eye(3) + b.kappa * np.outer(b.beta, b.beta)
    M[:3, 3] = off_sign * g * b.beta
    M[3, :3] = off_sign * g * b.beta
    M[3, 3] = g
    return M


def boost_matrix(b: BoostParams, kind: str = "coordinates") -> np.ndarray:
    """Block matrix in the ``(vector, time-like)`` ordering.

    ``kind="coordinates"`` gives the coordinate rule (off-diagonal ``-gamma beta``);
    ``kind="momentum"`` gives the momentum/potential rule (off-diagonal ``+gamma beta``).
    """
    if kind == "coordinates":
        return _block(b, -1.0)
    if kind == "momentum":
        return _block(b, +1.0)
    raise ValueError(f"unknown boost matrix kind {kind!r}")


def boost_coordinates(q, t: float, b: BoostParams, c: float = 1.0) -> tuple[np.ndarray, float]:
    """Map unprimed ``(q, t)`` to primed ``(Q, T)``."""
    x = np.append(_vec3(q, "q"), c * float(t))
    y = boost_matrix(b, "coordinates") @ x
    return y[:3], float(y[3] / c)


def unboost_coordinates(Q, T: float, b: BoostParams, c: float = 1.0) -> tuple[np.ndarray, float]:
    """Inverse of :func:`boost_coordinates`."""
    return boost_coordinates(Q, T, b.inverse(), c)


def boost_momentum_energy(P_k, E_k: float, b: BoostParams, c: float = 1.0, inverse: bool = False):
    """Kinetic momentum/energy rule.

    Default direction is primed to unprimed: ``(P_k, E_k) -> (p_k, e_k)``.
    With ``inverse=True`` the first two arguments are read as ``(p_k, e_k)`` and
    the primed pair is returned.
    """
    bb = b.inverse() if inverse else b
    x = np.append(_vec3(P_k, "momentum"), float(E_k) / c)
    y = boost_matrix(bb, "momentum") @ x
    return y[:3], float(y[3] * c)


def boost_potentials(A, phi: float, b: BoostParams, inverse: bool = False):
    """Potentials transform like ``(p_k, e_k/c)``: ``(A', phi') -> (A, phi)`` by default."""
    bb = b.inverse() if inverse else b
    y = boost_matrix(bb, "momentum") @ np.append(_vec3(A, "A"), float(phi))
    return y[:3], float(y[3])


def compose_parallel_rapidity(b1: float, b2: float) -> float:
    """Relativistic velocity addition for parallel boosts."""
    return (b1 + b2) / (1.0 + b1 * b2)


def boost_generating_function(q, P_k, t: float, E_k: float, b: BoostParams, c: float = 1.0) -> float:
    """Type-2 generating function of the boost.

    ``F2 = P_k.q - gamma [E_k t + beta.(P_k c t - E_k q / c)] + kappa (beta.P_k)(beta.q)``
    with ``kappa = (gamma - 1)/beta^2``.
    """
    q = _vec3(q, "q")
    P = _vec3(P_k, "P_k")
    beta = b.beta
    g = b.gamma
    return float(
        P @ q
        - g * (E_k * t + beta @ (P * c * t - E_k * q / c))
        + b.kappa * (beta @ P) * (beta @ q)
    )


def boost_generating_gradients(q, P_k, t: float, E_k: float, b: BoostParams, c: float = 1.0, h: float = 1e-4):
    """Central-difference transformation rules from the generating function.

    Returns a dict with ``p_k = dF2/dq``, ``Q = dF2/dP_k``, ``e_k = -dF2/dt``,
    ``T = -dF2/dE_k``.
    """
    q = _vec3(q, "q")
    P = _vec3(P_k, "P_k")
    x0 = np.concatenate([q, P, [float(t), float(E_k)]])

    def F(x):
        return boost_generating_function(x[:3], x[3:6], x[6], x[7], b, c)

    grad = np.empty(8)
    for i in range(8):
        step = h * max(1.0, abs(x0[i]))
        xp, xm = x0.copy(), x0.copy()
        xp[i] += step
        xm[i] -= step
        grad[i] = (F(xp) - F(xm)) / (2.0 * step)
    return {"p_k": grad[:3], "Q": grad[3:6], "e_k": -grad[6], "T": -grad[7]}


def hamiltonian_boost_rule(h_prime: float, P_k, b: BoostParams, c: float = 1.0) -> float:
    """Conventional Hamiltonian value in the unprimed frame: ``gamma (H' + c beta.P_k)``."""
    return b.gamma * (float(h_prime) + c * float(b.beta @ _vec3(P_k, "P_k")))


# -- canonical maps on the packed 8-vector -----------------------------------


@dataclass(frozen=True)
class CanonicalMap:
    """Evaluable map ``(q^mu, p_mu) -> (Q^mu, P_mu)`` on packed 8-vectors."""

    forward: Callable[[np.ndarray], np.ndarray]
    label: str = "map"

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self.forward(np.asarray(z, dtype=float)), dtype=float)


@dataclass(frozen=True)
class CanonicalReport:
    label: str
    max_violation: float
    block_violations: dict
    h: float

    def passed(self, tol: float = 1e-6) -> bool:
        return self.max_violation < tol

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "max_violation": self.max_violation,
            "block_violations": dict(self.block_violations),
            "h": self.h,
        }


def identity_map() -> CanonicalMap:
    return CanonicalMap(lambda z: z.copy(), "identity")


def scaling_map(factor: float = 2.0) -> CanonicalMap:
    """``q -> factor q``, ``p -> factor p``; not canonical unless ``factor**2 == 1``."""
    return CanonicalMap(lambda z: factor * z, f"scaling x{factor:g}")


def trivial_generating_map() -> CanonicalMap:
    """Map generated by ``F2 = P.q - t E``: the identity, in particular ``T = t``."""
    return CanonicalMap(lambda z: z.copy(), "trivial F2 = P.q - tE")


def boost_canonical_map(b: BoostParams, c: float = 1.0) -> CanonicalMap:
    """The boost as a map on extended phase space (coordinates and canonical momenta)."""
    Mc = boost_matrix(b, "coordinates")
    Mp = boost_matrix(b.inverse(), "momentum")

    def fwd(z):
        x = np.append(z[1:4], z[0])
        y = Mc @ x
        # p_0 = -e/c, so the time-like slot of (p, e/c) is -p_0
        pe = np.append(z[5:8], -z[4])
        w = Mp @ pe
        return np.array([y[3], y[0], y[1], y[2], -w[3], w[0], w[1], w[2]])

    beta = ", ".join(f"{v:.6g}" for v in b.beta)
    return CanonicalMap(fwd, f"boost beta=({beta})")


def _pack_probe(probe, c: float) -> np.ndarray:
    if hasattr(probe, "canonical_coordinates"):
        return np.asarray(probe.canonical_coordinates(c), dtype=float)
    z = np.asarray(probe, dtype=float).reshape(-1)
    if z.shape != (8,):
        raise DomainError("probe must be an extended phase point or a packed 8-vector")
    return z


def _jacobian(f, z: np.ndarray, h: float) -> np.ndarray:
    n = z.size
    J = np.empty((n, n))
    for j in range(n):
        zp, zm = z.copy(), z.copy()
        zp[j] += h
        zm[j] -= h
        J[:, j] = (f(zp) - f(zm)) / (2.0 * h)
    return J


def verify_extended_canonical(cmap: CanonicalMap, probe, h: float = 1e-4, c: float = 1.0) -> CanonicalReport:
    """Check the four derivative conditions of an extended canonical map at ``probe``.

    With ``J = d(Q, P)/d(q, p)`` and ``K = J^-1 = d(q, p)/d(Q, P)``, a canonical
    map satisfies ``dQ/dq = (dp/dP)^T``, ``dQ/dp = -(dq/dP)^T``,
    ``dP/dq = -(dp/dQ)^T`` and ``dP/dp = (dq/dQ)^T``. The largest absolute
    violation is reported.
    """
    z = _pack_probe(probe, c)
    try:
        J = _jacobian(cmap, z, h)
        K = np.linalg.inv(J)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise DomainError(f"map {cmap.label!r} could not be differentiated at the probe: {exc}") from exc
    A, B, C, D = J[:4, :4], J[:4, 4:], J[4:, :4], J[4:, 4:]
    qQ, qP, pQ, pP = K[:4, :4], K[:4, 4:], K[4:, :4], K[4:, 4:]
    blocks = {
        "dQ/dq = dp/dP": float(np.max(np.abs(A - pP.T))),
        "dQ/dp = -dq/dP": float(np.max(np.abs(B + qP.T))),
        "dP/dq = -dp/dQ": float(np.max(np.abs(C + pQ.T))),
        "dP/dp = dq/dQ": float(np.max(np.abs(D - qQ.T))),
    }
    return CanonicalReport(cmap.label, max(blocks.values()), blocks, h)
