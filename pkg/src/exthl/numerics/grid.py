"""Uniform space-time lattices carrying complex wave-function samples."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError

__all__ = ["LAYOUTS", "WaveGrid"]

# axis 0 is always the time coordinate t (not ct)
LAYOUTS = {
    "1+1": ("t", "x"),
    "3+1-radial": ("t", "r"),
    "3+1": ("t", "x", "y", "z"),
}


@dataclass(frozen=True)
class WaveGrid:
    """Complex samples ``psi`` on a uniform lattice.

    ``spacings[k]`` and ``offsets[k]`` give the step and the coordinate of
    index 0 along axis ``k``. For the ``3+1-radial`` layout the second axis is
    the radius of a spherically symmetric field and must stay positive.
    """

    layout: str
    spacings: tuple
    offsets: tuple
    psi: np.ndarray
    c: float = 1.0
    boundary_flag: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise DomainError(f"unknown grid layout {self.layout!r}; expected one of {sorted(LAYOUTS)}")
        ndim = len(LAYOUTS[self.layout])
        psi = np.asarray(self.psi, dtype=complex)
        if psi.ndim != ndim:
            raise DomainError(f"layout {self.layout} needs a {ndim}-d sample array, got {psi.ndim}-d")
        if len(self.spacings) != ndim or len(self.offsets) != ndim:
            raise DomainError("spacings and offsets need one entry per axis")
        if not all(float(h) > 0 for h in self.spacings):
            raise DomainError("grid spacings must be positive")
        if not np.all(np.isfinite(psi)):
            raise DomainError("grid samples must be finite")
        if self.layout == "3+1-radial" and float(self.offsets[1]) <= 0:
            raise DomainError("radial grids must start at r > 0")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "spacings", tuple(float(h) for h in self.spacings))
        object.__setattr__(self, "offsets", tuple(float(o) for o in self.offsets))

    @property
    def shape(self) -> tuple:
        return self.psi.shape

    @property
    def axes(self) -> tuple:
        return LAYOUTS[self.layout]

    def axis_coords(self, k: int) -> np.ndarray:
        return self.offsets[k] + self.spacings[k] * np.arange(self.shape[k])

    def coords(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis."""
        return np.meshgrid(*(self.axis_coords(k) for k in range(self.psi.ndim)), indexing="ij")

    def point_coords(self, index) -> np.ndarray:
        idx = np.asarray(index, dtype=float)
        return np.asarray(self.offsets) + np.asarray(self.spacings) * idx

    def with_samples(self, psi: np.ndarray, boundary_flag: np.ndarray | None = None) -> "WaveGrid":
        return WaveGrid(self.layout, self.spacings, self.offsets, psi, self.c, boundary_flag)

    @classmethod
    def from_function(cls, layout: str, spacings, offsets, shape, fn, c: float = 1.0) -> "WaveGrid":
        """Sample ``fn(*coords)`` on a lattice of the given ``shape``."""
        axes = [offsets[k] + spacings[k] * np.arange(n) for k, n in enumerate(shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return cls(layout, tuple(spacings), tuple(offsets), np.asarray(fn(*mesh), dtype=complex), c)
