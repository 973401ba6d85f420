"""CSV and JSON serialization of trajectories.

Numbers are written with 17 significant digits so that they round-trip
exactly through text.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..fields import FieldConfig
from ..numerics.specs import OdeSpec
from .integrate import ConventionalTrajectory, TrajectoryRecord, _diagnostics, extended_rhs
from .state import ParticleParams

__all__ = [
    "TRAJECTORY_COLUMNS",
    "CONVENTIONAL_COLUMNS",
    "fmt",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "trajectory_to_json",
    "write_conventional_csv",
]

TRAJECTORY_COLUMNS = (
    "s", "t", "e", "q1", "q2", "q3", "p1", "p2", "p3", "residual_v", "residual_e", "e1",
)
CONVENTIONAL_COLUMNS = ("t", "q1", "q2", "q3", "p1", "p2", "p3", "e")


def fmt(x: float) -> str:
    """17-significant-digit text form of a float."""
    return format(float(x), ".17g")


def _write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_trajectory_csv(record: TrajectoryRecord, path) -> Path:
    cols = np.column_stack([record.s, record.y, record.residual_v, record.residual_e, record.e1])
    return _write_rows(path, TRAJECTORY_COLUMNS, cols)


def write_conventional_csv(traj: ConventionalTrajectory, path) -> Path:
    cols = np.column_stack([traj.t, traj.q, traj.p, traj.e])
    return _write_rows(path, CONVENTIONAL_COLUMNS, cols)


def read_trajectory_csv(
    path, params: ParticleParams, field: FieldConfig, spec: OdeSpec | None = None
) -> TrajectoryRecord:
    """Load a CSV written by :func:`write_trajectory_csv`.

    The derivative samples are recomputed from the equations of motion and
    the constraint columns are re-derived; no dense output is attached.
    """
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory columns {header}")
        data = np.array([[float(v) for v in row] for row in reader])
    s, y = data[:, 0], data[:, 1:9]
    rhs = extended_rhs(params, field)
    dyds = np.array([rhs(si, yi) for si, yi in zip(s, y)])
    rv, re, e1 = _diagnostics(params, field, s, y)
    return TrajectoryRecord(s, y, dyds, rv, re, e1, {}, params, field, spec or OdeSpec(), "extended")


def trajectory_to_json(record: TrajectoryRecord, include_samples: bool = True) -> str:
    """JSON document with metadata (params, field, spec, stats) and optionally the samples."""
    doc = record.metadata()
    doc["max_constraint_residual"] = record.max_constraint_residual()
    doc["e1_drift"] = record.e1_drift()
    if include_samples:
        doc["columns"] = list(TRAJECTORY_COLUMNS)
        doc["samples"] = np.column_stack(
            [record.s, record.y, record.residual_v, record.residual_e, record.e1]
        ).tolist()
    return json.dumps(doc, sort_keys=True, indent=1)
