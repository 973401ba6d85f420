"""Binary lattice files with a JSON sidecar, and kernel tables as CSV.

Binary layout (all little-endian float64): ``ndim``, the ``ndim`` axis
lengths, the ``ndim`` spacings, the ``ndim`` offsets, then the samples in C
order with real and imaginary parts interleaved. The sidecar ``<path>.json``
repeats the header in readable form together with the layout name and ``c``.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..dynamics.io import fmt
from ..errors import DomainError
from ..numerics.grid import LAYOUTS, WaveGrid
from .kernels import KernelComparison

__all__ = ["write_grid", "read_grid", "KERNEL_COLUMNS", "write_kernel_csv"]

_LE = np.dtype("<f8")
KERNEL_COLUMNS = ("tau", "closed_re", "closed_im", "quad_re", "quad_im", "rel_discrepancy")


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def write_grid(grid: WaveGrid, path) -> Path:
    path = Path(path)
    nd = grid.psi.ndim
    header = np.array([nd, *grid.shape, *grid.spacings, *grid.offsets], dtype=_LE)
    payload = np.ascontiguousarray(grid.psi, dtype=np.complex128).view(np.float64).astype(_LE).ravel()
    with path.open("wb") as fh:
        fh.write(header.tobytes())
        fh.write(payload.tobytes())
    meta = {
        "layout": grid.layout,
        "axes": list(grid.axes),
        "shape": list(grid.shape),
        "spacings": list(grid.spacings),
        "offsets": list(grid.offsets),
        "c": grid.c,
        "dtype": "float64",
        "byte_order": "little",
        "interleaved": "re,im",
        "header_values": int(header.size),
    }
    _sidecar(path).write_text(json.dumps(meta, sort_keys=True, indent=1))
    return path


def read_grid(path) -> WaveGrid:
    path = Path(path)
    meta = json.loads(_sidecar(path).read_text())
    layout = meta["layout"]
    if layout not in LAYOUTS:
        raise DomainError(f"unknown layout {layout!r} in sidecar")
    raw = np.frombuffer(path.read_bytes(), dtype=_LE)
    nd = int(raw[0])
    shape = tuple(int(n) for n in raw[1:1 + nd])
    spacings = tuple(raw[1 + nd:1 + 2 * nd].tolist())
    offsets = tuple(raw[1 + 2 * nd:1 + 3 * nd].tolist())
    if list(shape) != meta["shape"]:
        raise DomainError("binary header and sidecar disagree on the grid shape")
    body = raw[1 + 3 * nd:]
    if body.size != 2 * int(np.prod(shape)):
        raise DomainError("payload size does not match the header")
    psi = body.astype(np.float64).view(np.complex128).reshape(shape)
    return WaveGrid(layout, spacings, offsets, psi.copy(), float(meta["c"]))


def write_kernel_csv(rows: list[KernelComparison], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(KERNEL_COLUMNS)
        for r in rows:
            w.writerow([fmt(v) for v in r.to_row()])
    return path
