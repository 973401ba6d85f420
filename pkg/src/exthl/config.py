"""Scenario configuration: TOML text validated against a versioned schema.

Unknown keys are rejected everywhere. :func:`canonical_toml` re-serializes a
parsed configuration with every default filled in and keys sorted, so that
``load -> canonical_toml -> load`` is a fixed point.
"""
from __future__ import annotations

import math
import os
import sys
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

from .dynamics.state import ParticleParams
from .errors import ConfigError, DomainError
from .fields import FIELD_KINDS, FieldConfig
from .numerics.specs import OdeSpec, QuadratureSpec

__all__ = [
    "SCHEMA_VERSION",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "canonical_toml",
    "format_validation_error",
]

SCHEMA_VERSION = 1

_FIELD_KEYS = {
    "zero": set(),
    "uniform-electric": {"E"},
    "uniform-magnetic": {"B"},
    "plane-wave": {"amplitude", "wave_vector", "phase", "c"},
    "coulomb": {"strength", "softening"},
}

Vec3 = list[float]


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_vec3(v):
    if v is not None and len(v) != 3:
        raise ValueError("expected a list of 3 numbers")
    return v


class Units(_Block):
    m: float = Field(gt=0)
    c: float = Field(default=1.0, gt=0)
    hbar: float = Field(default=1.0, gt=0)
    zeta: float = 1.0


class FieldBlock(BaseModel):
    model_config = ConfigDict(extra="allow")
    kind: str = "zero"

    @model_validator(mode="after")
    def _known(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}; expected one of {list(FIELD_KINDS)}")
        extra = set(self.model_extra or {})
        unknown = extra - _FIELD_KEYS[self.kind]
        if unknown:
            raise ValueError(f"keys {sorted(unknown)} are not valid for field kind {self.kind!r}")
        try:
            FieldConfig.from_dict(self.model_dump())
        except DomainError as exc:
            raise ValueError(str(exc)) from exc
        return self

    def to_field(self) -> FieldConfig:
        return FieldConfig.from_dict(self.model_dump())


class Initial(_Block):
    q: Vec3 = [0.0, 0.0, 0.0]
    v: Vec3 | None = None
    p: Vec3 | None = None
    t: float = 0.0
    s: float = 0.0

    _v3 = field_validator("q", "v", "p")(_check_vec3)

    @model_validator(mode="after")
    def _one_of(self):
        if self.v is not None and self.p is not None:
            raise ValueError("give either v (3-velocity) or p (canonical momentum), not both")
        if self.v is None and self.p is None:
            self.v = [0.0, 0.0, 0.0]
        return self


class Integrator(_Block):
    rel_tol: float = Field(default=1e-10, gt=0)
    abs_tol: float = Field(default=1e-13, gt=0)
    max_step: float = Field(default=math.inf, gt=0)
    max_steps: int = Field(default=1_000_000, ge=1)
    s_end: float = 10.0
    dense: bool = True

    def spec(self) -> OdeSpec:
        return OdeSpec(self.rel_tol, self.abs_tol, self.max_step, self.max_steps)


class Quadrature(_Block):
    eps_reg: float = Field(default=0.05, gt=0)
    sigma_min: float = Field(default=1e-12, gt=0)
    sigma_max: float = Field(default=1e4, gt=0)
    rel_tol: float = Field(default=1e-11, gt=0)
    max_evals: int = Field(default=5_000_000, ge=15)

    def spec(self) -> QuadratureSpec:
        return QuadratureSpec(self.eps_reg, self.sigma_min, self.sigma_max, self.rel_tol, self.max_evals)


class Kernel(_Block):
    """Either proper times ``tau`` (separation ``(0, tau)``) or explicit
    ``separations`` given as ``[dt, dx, dy, dz]`` rows."""

    tau: list[float] | None = None
    separations: list[list[float]] | None = None
    N: float = Field(default=1.0, gt=0)

    @field_validator("separations")
    @classmethod
    def _rows(cls, v):
        if v is not None and any(len(r) != 4 for r in v):
            raise ValueError("each separation is [dt, dx, dy, dz]")
        return v

    @model_validator(mode="after")
    def _some(self):
        if (self.tau is None) == (self.separations is None):
            raise ValueError("give exactly one of tau or separations")
        return self


class Boost(_Block):
    beta: Vec3

    _v3 = field_validator("beta")(_check_vec3)


class Output(_Block):
    dir: str = "."
    prefix: str = ""


class ScenarioConfig(_Block):
    schema_version: Literal[1] = SCHEMA_VERSION
    units: Units
    field: FieldBlock = FieldBlock()
    initial: Initial = Initial()
    integrator: Integrator = Integrator()
    quadrature: Quadrature = Quadrature()
    kernel: Kernel | None = None
    boost: Boost | None = None
    output: Output = Output()

    def params(self) -> ParticleParams:
        u = self.units
        return ParticleParams(m=u.m, zeta=u.zeta, c=u.c, hbar=u.hbar)


def format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "\n".join(lines)


def parse_config(text: str) -> ScenarioConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"<toml>: {exc}") from exc
    try:
        return ScenarioConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(format_validation_error(exc)) from exc


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"<file>: cannot read {path}: {exc}") from exc
    return parse_config(text)


def _sorted(obj):
    if isinstance(obj, dict):
        return {k: _sorted(obj[k]) for k in sorted(obj) if obj[k] is not None}
    if isinstance(obj, list):
        return [_sorted(v) for v in obj]
    return obj


def canonical_toml(cfg: ScenarioConfig) -> str:
    """Fully expanded configuration with sorted keys (``None`` entries dropped)."""
    return tomli_w.dumps(_sorted(cfg.model_dump()))


def check_output_dir(path) -> Path:
    """Create ``path`` if needed and confirm it is writable."""
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output.dir: cannot create {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output.dir: {path} is not writable")
    return path
