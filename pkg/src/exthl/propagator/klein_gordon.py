"""Klein-Gordon residual and the short-time (first order in the parameter
step) map on wave-function lattices.

With ``D_alpha = d_alpha - (i zeta/(hbar c)) A_alpha`` the equation is
``D_alpha D^alpha psi = (m c/hbar)^2 psi``. Expanded,

    box psi - (2 i zeta/(hbar c)) A^a d_a psi - (i zeta/(hbar c)) (d_a A^a) psi
        - (zeta^2/(hbar^2 c^2)) A_a A^a psi - (m c/hbar)^2 psi = 0,

where ``A^0 = phi``, ``d_0 = (1/c) d_t`` and ``A_a A^a = |A|^2 - phi^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dynamics.state import ParticleParams
from ..errors import DomainError, GridIndexError
from ..fields import FieldConfig, eval_potentials_many
from ..numerics.grid import WaveGrid
from ..numerics.stencils import central_first, dalembert_interior, interior_slices
from .kernels import kernel_closed_form

__all__ = [
    "KGResidual",
    "kg_residual",
    "lightcone_mask",
    "short_time_step",
    "plane_wave_grid",
    "off_shell_mismatch",
    "kernel_grid",
]


@dataclass(frozen=True)
class KGResidual:
    """Pointwise residual on the grid interior and its masked maximum."""

    residual: np.ndarray
    mask: np.ndarray
    max_abs: float
    n_points: int

    def to_dict(self) -> dict:
        return {"max_abs": self.max_abs, "n_points": self.n_points}


@dataclass(frozen=True)
class _Terms:
    psi: np.ndarray        # interior samples
    box: np.ndarray        # d'Alembertian
    a_grad: np.ndarray     # A^a d_a psi
    div_a: np.ndarray      # d_a A^a
    a_sq: np.ndarray       # A_a A^a


def _interior_positions(grid: WaveGrid) -> tuple[np.ndarray, np.ndarray]:
    """Time and 3-position of every interior point, flattened in C order."""
    axes = [grid.axis_coords(k)[1:-1] for k in range(grid.psi.ndim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    t = mesh[0].ravel()
    q = np.zeros((t.size, 3))
    if grid.layout == "1+1":
        q[:, 0] = mesh[1].ravel()
    elif grid.layout == "3+1":
        for j in range(3):
            q[:, j] = mesh[j + 1].ravel()
    return t, q


def _kg_terms(grid: WaveGrid, field: FieldConfig | None) -> _Terms:
    if min(grid.shape) < 3:
        raise GridIndexError(f"grid of shape {grid.shape} has no interior points")
    psi = grid.psi
    inner = psi[interior_slices(psi.ndim)]
    box = dalembert_interior(grid)
    zero = np.zeros(inner.shape)
    if field is None or field.kind == "zero":
        return _Terms(inner, box, np.zeros_like(inner), zero, zero)
    if grid.layout == "3+1-radial":
        raise DomainError("the radial layout only supports the free field")
    c = grid.c
    t, q = _interior_positions(grid)
    pot = eval_potentials_many(field, q, t)
    shape = inner.shape
    phi = pot.phi.reshape(shape)
    # A^0 d_0 psi = (phi/c)(1/c) d_t psi
    a_grad = (phi / (c * c)) * central_first(psi, 0, grid.spacings[0])
    for k in range(1, psi.ndim):
        a_grad = a_grad + pot.A[:, k - 1].reshape(shape) * central_first(psi, k, grid.spacings[k])
    div_a = (pot.dphi_dt / (c * c) + np.trace(pot.dA_dq, axis1=1, axis2=2)).reshape(shape)
    a_sq = (np.einsum("ij,ij->i", pot.A, pot.A) - pot.phi**2).reshape(shape)
    return _Terms(inner, box, a_grad, div_a, a_sq)


def lightcone_mask(grid: WaveGrid, event, margin: float = 10.0) -> np.ndarray:
    """Interior points with ``tau^2 > margin h^2`` relative to ``event = (t_a, q_a)``.

    ``h`` is the largest spacing in time units (space steps divided by
    ``c``). On the radial layout ``q_a`` must be the origin.
    """
    ta, qa = event
    qa = np.asarray(qa, dtype=float).reshape(-1)
    if qa.size == 1:
        qa = np.array([qa[0], 0.0, 0.0])
    if grid.layout == "3+1-radial" and np.any(qa != 0.0):
        raise DomainError("radial grids are centred on the origin; the source event must be at q = 0")
    t, q = _interior_positions(grid)
    if grid.layout == "3+1-radial":
        r = np.meshgrid(grid.axis_coords(0)[1:-1], grid.axis_coords(1)[1:-1], indexing="ij")[1].ravel()
        dist2 = r * r
    else:
        dist2 = np.einsum("ij,ij->i", q - qa, q - qa)
    c = grid.c
    tau2 = (t - float(ta)) ** 2 - dist2 / (c * c)
    h = max(grid.spacings[0], max(grid.spacings[1:]) / c)
    inner_shape = tuple(n - 2 for n in grid.shape)
    return (tau2 > margin * h * h).reshape(inner_shape)


def kg_residual(
    grid: WaveGrid,
    params: ParticleParams,
    field: FieldConfig | None = None,
    event=None,
    margin: float = 10.0,
) -> KGResidual:
    """Pointwise Klein-Gordon residual with second-order central differences.

    If ``event = (t_a, q_a)`` is given (a kernel source), interior points
    within ``margin`` squared spacings of its light cone are excluded from
    the maximum.
    """
    if not math.isclose(grid.c, params.c):
        raise DomainError("grid and particle use different values of c")
    tm = _kg_terms(grid, field)
    hc = params.hbar * params.c
    z = params.zeta
    res = (
        tm.box
        - (2j * z / hc) * tm.a_grad
        - (1j * z / hc) * tm.div_a * tm.psi
        - (z * z / (hc * hc)) * tm.a_sq * tm.psi
        - (params.m * params.c / params.hbar) ** 2 * tm.psi
    )
    mask = np.ones(res.shape, dtype=bool) if event is None else lightcone_mask(grid, event, margin)
    n = int(mask.sum())
    if n == 0:
        raise GridIndexError("no interior points remain outside the light-cone margin")
    return KGResidual(res, mask, float(np.max(np.abs(res[mask]))), n)


def short_time_step(
    grid: WaveGrid, params: ParticleParams, eps: float, field: FieldConfig | None = None
) -> WaveGrid:
    """Advance the samples by a parameter step ``eps`` to first order.

    ``psi -> (1 - i eps m c^2/(2 hbar)) (1 - i eps zeta^2 A_a A^a/(2 hbar m c^2))
    [psi + eps (zeta/(m c)) A^a d_a psi + eps (i hbar/(2m)) (box psi - (i zeta/(hbar c)) (d_a A^a) psi)]``.

    Interior points are updated; boundary samples are copied unchanged and
    marked in ``boundary_flag``.
    """
    if not (math.isfinite(eps) and eps > 0):
        raise DomainError("the parameter step must be positive")
    tm = _kg_terms(grid, field)
    m, c, hbar, z = params.m, params.c, params.hbar, params.zeta
    bracket = tm.psi + eps * (z / (m * c)) * tm.a_grad + eps * (1j * hbar / (2.0 * m)) * (
        tm.box - (1j * z / (hbar * c)) * tm.div_a * tm.psi
    )
    factor = (1.0 - 1j * eps * m * c * c / (2.0 * hbar)) * (
        1.0 - 1j * eps * z * z * tm.a_sq / (2.0 * hbar * m * c * c)
    )
    out = np.array(grid.psi, dtype=complex)
    out[interior_slices(out.ndim)] = factor * bracket
    flag = np.ones(out.shape, dtype=bool)
    flag[interior_slices(out.ndim)] = False
    return grid.with_samples(out, flag)


def plane_wave_grid(
    layout: str, k, omega: float, spacings, shape, offsets=None, c: float = 1.0
) -> WaveGrid:
    """Samples of ``exp[i(k . x - omega t)]`` on a lattice.

    ``k`` has one component per spatial axis of the layout (the radial
    layout is not supported).
    """
    if layout == "3+1-radial":
        raise DomainError("plane waves are not spherically symmetric")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    offsets = offsets if offsets is not None else (0.0,) * len(shape)

    def fn(t, *xs):
        phase = -omega * t
        for kj, xj in zip(k, xs):
            phase = phase + kj * xj
        return np.exp(1j * phase)

    return WaveGrid.from_function(layout, spacings, offsets, shape, fn, c)


def off_shell_mismatch(params: ParticleParams, k, omega: float) -> float:
    """``Delta = hbar^2 k_a k^a + m^2 c^2`` for the four-wavevector ``(omega/c, k)``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    kk = float(k @ k) - (omega / params.c) ** 2
    return params.hbar**2 * kk + (params.m * params.c) ** 2


def kernel_grid(
    params: ParticleParams, t_range, r_range, h: float, N: float = 1.0
) -> WaveGrid:
    """Closed-form kernel from a source at the origin, sampled on a radial patch.

    The lattice carries one extra cell on every side, so its interior is
    exactly ``t_range x r_range`` at every spacing ``h`` and residual norms
    from successive refinements cover the same points.
    """
    (t0, t1), (r0, r1) = t_range, r_range
    nt = int(round((t1 - t0) / h))
    nr = int(round((r1 - r0) / h))
    if nt < 1 or nr < 1 or not (math.isclose(nt * h, t1 - t0) and math.isclose(nr * h, r1 - r0)):
        raise DomainError("the patch extents must be positive multiples of h")
    if r0 - h <= 0:
        raise DomainError("the padded patch must stay at r > 0")
    c = params.c

    def fn(t, r):
        tau2 = t * t - (r / c) ** 2
        if np.any(tau2 <= 0):
            raise DomainError("kernel patch reaches the light cone of the source")
        return kernel_closed_form(params, np.sqrt(tau2), N)

    return WaveGrid.from_function("3+1-radial", (h, h), (t0 - h, r0 - h), (nt + 3, nr + 3), fn, c)
