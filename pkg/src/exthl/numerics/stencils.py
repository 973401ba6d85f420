"""Second-order central-difference stencils on :class:`WaveGrid` lattices.

The d'Alembertian uses the metric diag(-1, +1, +1, +1):
``box = -(1/c^2) d_t^2 + laplacian``. On the radial layout the Laplacian of
a spherically symmetric field is ``d_r^2 + (2/r) d_r``.
"""
from __future__ import annotations

import numpy as np

from ..errors import GridIndexError
from .grid import WaveGrid

__all__ = [
    "interior_slices",
    "central_first",
    "central_second",
    "dalembert_interior",
    "finite_diff_dalembert",
]


def interior_slices(ndim: int, width: int = 1) -> tuple:
    return tuple(slice(width, -width) for _ in range(ndim))


def _shifted(a: np.ndarray, axis: int, shift: int) -> np.ndarray:
    """Interior view of ``a`` displaced by ``shift`` cells along ``axis``."""
    sl = []
    for k in range(a.ndim):
        if k == axis:
            stop = a.shape[k] - 1 + shift
            sl.append(slice(1 + shift, stop if stop != 0 else None))
        else:
            sl.append(slice(1, -1))
    return a[tuple(sl)]


def central_first(a: np.ndarray, axis: int, h: float) -> np.ndarray:
    """``(a[i+1] - a[i-1]) / 2h`` on the interior (one cell trimmed on every side)."""
    return (_shifted(a, axis, 1) - _shifted(a, axis, -1)) / (2.0 * h)


def central_second(a: np.ndarray, axis: int, h: float) -> np.ndarray:
    """``(a[i+1] - 2a[i] + a[i-1]) / h^2`` on the interior."""
    return (_shifted(a, axis, 1) - 2.0 * _shifted(a, axis, 0) + _shifted(a, axis, -1)) / (h * h)


def _check_size(grid: WaveGrid):
    if min(grid.shape) < 3:
        raise GridIndexError(f"grid of shape {grid.shape} has no interior points")


def dalembert_interior(grid: WaveGrid) -> np.ndarray:
    """d'Alembertian of ``grid.psi`` at every interior point."""
    _check_size(grid)
    psi = grid.psi
    h = grid.spacings
    out = -central_second(psi, 0, h[0]) / grid.c**2
    for k in range(1, psi.ndim):
        out = out + central_second(psi, k, h[k])
    if grid.layout == "3+1-radial":
        r = grid.axis_coords(1)[1:-1]
        out = out + (2.0 / r)[None, :] * central_first(psi, 1, h[1])
    return out


def finite_diff_dalembert(grid: WaveGrid, point, order: int = 2) -> complex:
    """Central-difference d'Alembertian at a single lattice index.

    ``point`` must lie at least one cell from every boundary; otherwise a
    :class:`GridIndexError` is raised. Only ``order=2`` is available.
    """
    if order != 2:
        raise ValueError("only the second-order stencil is implemented")
    idx = tuple(int(i) for i in point)
    if len(idx) != grid.psi.ndim:
        raise GridIndexError(f"index {idx} does not match grid dimension {grid.psi.ndim}")
    for i, n in zip(idx, grid.shape):
        if i < 1 or i > n - 2:
            raise GridIndexError(f"index {idx} is within one cell of the boundary of shape {grid.shape}")
    psi = grid.psi
    total = 0j
    for k in range(psi.ndim):
        up = list(idx)
        dn = list(idx)
        up[k] += 1
        dn[k] -= 1
        second = (psi[tuple(up)] - 2.0 * psi[idx] + psi[tuple(dn)]) / grid.spacings[k] ** 2
        total += -second / grid.c**2 if k == 0 else second
        if grid.layout == "3+1-radial" and k == 1:
            r = grid.offsets[1] + grid.spacings[1] * idx[1]
            total += (2.0 / r) * (psi[tuple(up)] - psi[tuple(dn)]) / (2.0 * grid.spacings[1])
    return complex(total)
