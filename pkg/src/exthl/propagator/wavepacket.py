"""Wave-packet propagation with the integrated kernel and calibration of the
kernel normalization ``N``.

``psi(b) = int K(b, a) psi(a) d^4 a`` is evaluated as a quadrature over the
source lattice (rectangle rule, weight = cell volume). Every pair of source
and target events must be time-like separated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dynamics.state import ParticleParams
from ..errors import DomainError, UnsupportedSeparationError
from ..numerics.grid import WaveGrid
from .kernels import kernel_closed_form

__all__ = [
    "propagate_wavepacket",
    "kg_charge_radial",
    "PacketSpec",
    "gaussian_packet_source",
    "NormCalibration",
    "norm_from_charges",
    "calibrate_norm",
]

_CHUNK = 2_000_000


def _check_timelike(tau2: np.ndarray):
    if np.any(tau2 <= 0):
        worst = float(np.min(tau2))
        kind = "lightlike" if worst == 0 else "spacelike"
        raise UnsupportedSeparationError(
            f"a source/target pair is {kind} (tau^2 = {worst:.17g}); move the targets further into the future"
        )


def propagate_wavepacket(
    source: WaveGrid,
    targets,
    params: ParticleParams,
    N: float = 1.0,
    n_angle: int = 48,
) -> np.ndarray:
    """Propagated amplitude at each target event ``(t, x, y, z)``.

    ``3+1`` sources are summed cell by cell. ``3+1-radial`` sources are
    spherically symmetric about the origin; the angular integral over the
    source shell is done with ``n_angle`` Gauss-Legendre nodes in
    ``cos(theta)``. Only cells with non-zero samples contribute.
    """
    if source.layout == "1+1":
        raise DomainError("propagation needs a 3+1 or 3+1-radial source lattice")
    if not math.isclose(source.c, params.c):
        raise DomainError("grid and particle use different values of c")
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    if targets.shape[1] != 4 or not np.all(np.isfinite(targets)):
        raise DomainError("targets must be finite events (t, x, y, z)")
    c = params.c
    coords = [g.ravel() for g in source.coords()]
    psi = source.psi.ravel()
    keep = psi != 0
    psi = psi[keep]
    coords = [x[keep] for x in coords]
    cell = float(np.prod(source.spacings))
    out = np.zeros(targets.shape[0], dtype=complex)
    if psi.size == 0:
        return out
    tb = targets[:, 0]
    if source.layout == "3+1":
        ta, xa = coords[0], np.column_stack(coords[1:])
        step = max(1, _CHUNK // psi.size)
        for lo in range(0, targets.shape[0], step):
            sl = slice(lo, lo + step)
            dq = targets[sl, None, 1:] - xa[None]
            tau2 = (tb[sl, None] - ta[None]) ** 2 - np.einsum("ijk,ijk->ij", dq, dq) / c**2
            _check_timelike(tau2)
            out[sl] = cell * (kernel_closed_form(params, np.sqrt(tau2), N) @ psi)
        return out
    ta, ra = coords
    rb = np.linalg.norm(targets[:, 1:], axis=1)
    u, wu = np.polynomial.legendre.leggauss(n_angle)
    weight = cell * ra * ra * 2.0 * math.pi
    step = max(1, _CHUNK // (psi.size * n_angle))
    for lo in range(0, targets.shape[0], step):
        sl = slice(lo, lo + step)
        dt2 = (tb[sl, None] - ta[None]) ** 2
        # farthest point on the source shell is at distance r_a + r_b
        _check_timelike(dt2 - (ra[None] + rb[sl, None]) ** 2 / c**2)
        d2 = (rb[sl, None, None] ** 2 + ra[None, :, None] ** 2
              - 2.0 * rb[sl, None, None] * ra[None, :, None] * u[None, None, :])
        tau = np.sqrt(dt2[..., None] - d2 / c**2)
        ang = kernel_closed_form(params, tau, N) @ wu
        out[sl] = ang @ (weight * psi)
    return out


def kg_charge_radial(r: np.ndarray, psi: np.ndarray, dpsi_dt: np.ndarray, params: ParticleParams) -> float:
    """Klein-Gordon charge ``int (i hbar/(2 m c^2))(psi* d_t psi - psi d_t psi*) d^3 q`` on a radial slice.

    The radial integral uses the trapezoidal rule on the (uniform) samples ``r``.
    """
    density = -(params.hbar / (params.m * params.c**2)) * np.imag(np.conj(psi) * dpsi_dt)
    return float(np.trapezoid(4.0 * math.pi * r * r * density, r))


@dataclass(frozen=True)
class PacketSpec:
    """Spherical Gaussian test packet at rest and the slices used to measure it.

    The source is ``amplitude exp(-r^2/(2 width^2)) exp(-i m c^2 t/hbar)`` on
    ``t in [0, duration]`` and ``r in (0, r_extent * width]``. Its charge is
    taken on the middle source slice. Propagated charges are measured at
    each of ``target_times`` on radii ``(0, target_r_max]``.
    """

    width: float = 10.0
    amplitude: float = 1.0
    duration: float = 2.0
    n_t: int = 21
    r_extent: float = 4.0
    n_r: int = 40
    target_times: tuple = (110.0, 120.0)
    target_r_max: float = 60.0
    n_target_r: int = 61
    dt_probe: float = 1e-3
    n_angle: int = 48

    def __post_init__(self):
        if self.n_t < 3 or self.n_t % 2 == 0:
            raise DomainError("n_t must be odd and at least 3 so that a middle slice exists")
        if not (self.width > 0 and self.duration > 0 and self.r_extent > 0 and self.target_r_max > 0):
            raise DomainError("packet sizes must be positive")


def gaussian_packet_source(packet: PacketSpec, params: ParticleParams) -> WaveGrid:
    ht = packet.duration / (packet.n_t - 1)
    rmax = packet.r_extent * packet.width
    hr = rmax / packet.n_r
    w0 = params.m * params.c**2 / params.hbar

    def fn(t, r):
        return packet.amplitude * np.exp(-0.5 * (r / packet.width) ** 2 - 1j * w0 * t)

    return WaveGrid.from_function(
        "3+1-radial", (ht, hr), (0.0, hr), (packet.n_t, packet.n_r), fn, params.c
    )


@dataclass(frozen=True)
class NormCalibration:
    N: float
    source_charge: float
    target_charges: tuple
    fit_residual: float

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "source_charge": self.source_charge,
            "target_charges": list(self.target_charges),
            "fit_residual": self.fit_residual,
        }


def norm_from_charges(source_charge: float, target_charges) -> NormCalibration:
    """Least-squares ``N`` with ``Q_target(N) = Q_target(1)/N^2 = Q_source``.

    The fit is linear in ``x = 1/N^2``. ``fit_residual`` is the RMS relative
    mismatch of the fitted charges.
    """
    qt = np.asarray(target_charges, dtype=float)
    x = source_charge * float(qt @ qt) ** -1 * float(qt.sum())
    if not (x > 0 and math.isfinite(x)):
        raise DomainError("charges have inconsistent signs; no positive normalization fits them")
    rel = (qt * x - source_charge) / source_charge
    return NormCalibration(1.0 / math.sqrt(x), float(source_charge), tuple(qt.tolist()),
                           float(np.sqrt(np.mean(rel**2))))


def calibrate_norm(packet: PacketSpec, params: ParticleParams) -> NormCalibration:
    """Fit ``N`` so that the propagated Klein-Gordon charge matches the source charge."""
    src = gaussian_packet_source(packet, params)
    mid = packet.n_t // 2
    r_src = src.axis_coords(1)
    dpsi = (src.psi[mid + 1] - src.psi[mid - 1]) / (2.0 * src.spacings[0])
    q_src = kg_charge_radial(r_src, src.psi[mid], dpsi, params)
    rb = np.linspace(0.0, packet.target_r_max, packet.n_target_r)
    d = packet.dt_probe
    charges = []
    for tb in packet.target_times:
        ev = []
        for t in (tb - d, tb, tb + d):
            ev.append(np.column_stack([np.full(rb.size, t), rb, np.zeros(rb.size), np.zeros(rb.size)]))
        vals = propagate_wavepacket(src, np.vstack(ev), params, 1.0, packet.n_angle).reshape(3, rb.size)
        charges.append(kg_charge_radial(rb, vals[1], (vals[2] - vals[0]) / (2.0 * d), params))
    return norm_from_charges(q_src, charges)
