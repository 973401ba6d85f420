"""Adaptive explicit Runge-Kutta integration.

The stepper uses the 12-stage Dormand-Prince 8th-order solution with the
5th-order embedded estimate alone for error control (local extrapolation),
and a PI step-size controller. Accepted steps are all recorded; a 7th-order
continuous extension is built on demand for dense evaluation.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import IntegrationError
from . import _dop853 as tab
from .specs import OdeSpec

__all__ = ["OdeResult", "integrate_ode"]

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_ERR_ORDER = 6  # estimator is O(h^6)
_ALPHA = 0.7 / _ERR_ORDER
_BETA = 0.4 / _ERR_ORDER

_A = tab.A[: tab.N_STAGES, : tab.N_STAGES]
_C = tab.C[: tab.N_STAGES]
_A_EXTRA = tab.A[tab.N_STAGES + 1:]
_C_EXTRA = tab.C[tab.N_STAGES + 1:]


@dataclass
class _DenseStep:
    s_old: float
    h: float
    y_old: np.ndarray
    F: np.ndarray


def _eval_dense(s_old, h, y_old, F, s):
    """Vectorized continuous extension; ``F`` has shape ``(n, 7, dim)``."""
    x = ((s - s_old) / h)[:, None]
    y = np.zeros_like(y_old)
    for i in range(F.shape[1] - 1, -1, -1):
        y += F[:, i]
        y *= x if (F.shape[1] - 1 - i) % 2 == 0 else (1.0 - x)
    return y + y_old


@dataclass
class OdeResult:
    """Accepted steps of an integration plus counters.

    ``s`` has shape ``(n,)``, ``y`` and ``f`` have shape ``(n, dim)`` where
    ``f`` is the right-hand side at each sample.
    """

    s: np.ndarray
    y: np.ndarray
    f: np.ndarray
    n_steps: int
    n_rejected: int
    n_evals: int
    _dense: list = field(default_factory=list, repr=False)

    @property
    def stats(self) -> dict:
        return {"n_steps": self.n_steps, "n_rejected": self.n_rejected, "n_evals": self.n_evals}

    @property
    def has_dense(self) -> bool:
        return bool(self._dense)

    def __call__(self, s):
        """Evaluate the continuous extension at one or more parameter values."""
        if not self._dense:
            raise IntegrationError("dense output was not requested for this integration")
        scalar = np.ndim(s) == 0
        pts = np.atleast_1d(np.asarray(s, dtype=float))
        lo, hi = self.s[0], self.s[-1]
        if np.any(pts < lo - 1e-12 * max(1.0, abs(lo))) or np.any(pts > hi + 1e-12 * max(1.0, abs(hi))):
            raise IntegrationError("dense evaluation outside the integrated span")
        if not hasattr(self, "_packed"):
            self._packed = (
                np.array([d.s_old for d in self._dense]),
                np.array([d.h for d in self._dense]),
                np.array([d.y_old for d in self._dense]),
                np.array([d.F for d in self._dense]),
            )
        s_old, h, y_old, F = self._packed
        idx = np.searchsorted(self.s[1:-1], pts, side="right")
        out = _eval_dense(s_old[idx], h[idx], y_old[idx], F[idx], pts)
        return out[0] if scalar else out


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, spec: OdeSpec) -> float:
    scale = spec.abs_tol + spec.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def _initial_step(rhs, s0, y0, f0, direction_span, spec) -> float:
    scale = spec.abs_tol + spec.rel_tol * np.abs(y0)
    d0 = float(np.max(np.abs(y0) / scale))
    d1 = float(np.max(np.abs(f0) / scale))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, direction_span, spec.max_step)
    y1 = y0 + h0 * f0
    f1 = rhs(s0 + h0, y1)
    d2 = float(np.max(np.abs(f1 - f0) / scale)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 8)
    return min(100 * h0, h1, direction_span, spec.max_step)


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    span: tuple[float, float],
    spec: OdeSpec | None = None,
    dense: bool = False,
) -> OdeResult:
    """Integrate ``dy/ds = rhs(s, y)`` from ``span[0]`` to ``span[1]``.

    Raises :class:`IntegrationError` when ``spec.max_steps`` is exceeded or
    the right-hand side produces a non-finite value.
    """
    spec = spec or OdeSpec()
    s0, s1 = float(span[0]), float(span[1])
    if not s1 > s0:
        raise IntegrationError("integration span must be ordered with s_b > s_a")
    y = np.array(y0, dtype=float)
    n_evals = 0

    def call(s, yy):
        nonlocal n_evals
        n_evals += 1
        return np.asarray(rhs(s, yy), dtype=float)

    def check(vals, where):
        # one finiteness test per step instead of one per stage
        if not np.isfinite(vals).all():
            raise IntegrationError(f"right-hand side returned non-finite value near s={where!r}")

    f = call(s0, y)
    check(f, s0)
    ss, ys, fs = [s0], [y.copy()], [f.copy()]
    dense_steps = []
    h = _initial_step(call, s0, y, f, s1 - s0, spec)
    s = s0
    K = np.empty((tab.N_STAGES_EXTENDED, y.size))
    err_prev = 1.0
    n_steps = n_rejected = 0

    while s < s1:
        if n_steps + n_rejected >= spec.max_steps:
            raise IntegrationError(f"max_steps={spec.max_steps} exceeded at s={s!r}")
        h = min(h, spec.max_step)
        last = s + h >= s1 or (s1 - (s + h)) < 1e-12 * abs(s1)
        if last:
            h = s1 - s
        K[0] = f
        for i in range(1, tab.N_STAGES):
            K[i] = call(s + _C[i] * h, y + h * (_A[i, :i] @ K[:i]))
        y_new = y + h * (tab.B @ K[: tab.N_STAGES])
        f_new = call(s + h, y_new)
        K[tab.N_STAGES] = f_new
        check(K[: tab.N_STAGES + 1], s)
        err = _error_norm(h * (tab.E5 @ K[: tab.N_STAGES + 1]), y, y_new, spec)

        if err <= 1.0:
            if dense:
                dense_steps.append(_build_dense(call, s, h, y, y_new, f_new, K))
            s = s1 if last else s + h
            y, f = y_new, f_new
            ss.append(s)
            ys.append(y.copy())
            fs.append(f.copy())
            n_steps += 1
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err ** (-_ALPHA) * err_prev ** _BETA
                factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            h *= factor
        else:
            n_rejected += 1
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / _ERR_ORDER))
            if h < 1e-14 * max(1.0, abs(s)):
                raise IntegrationError(f"step size underflow at s={s!r}")

    return OdeResult(
        s=np.array(ss),
        y=np.array(ys),
        f=np.array(fs),
        n_steps=n_steps,
        n_rejected=n_rejected,
        n_evals=n_evals,
        _dense=dense_steps,
    )


def _build_dense(call, s, h, y_old, y_new, f_new, K) -> _DenseStep:
    Kx = K.copy()
    for j, (a, c) in enumerate(zip(_A_EXTRA, _C_EXTRA), start=tab.N_STAGES + 1):
        Kx[j] = call(s + c * h, y_old + h * (a[:j] @ Kx[:j]))
    F = np.empty((tab.INTERPOLATOR_POWER, y_old.size))
    f_old = Kx[0]
    dy = y_new - y_old
    F[0] = dy
    F[1] = h * f_old - dy
    F[2] = 2 * dy - h * (f_new + f_old)
    F[3:] = h * (tab.D @ Kx)
    return _DenseStep(s, h, y_old.copy(), F)
