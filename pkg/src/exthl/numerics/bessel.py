"""Bessel functions of integer order 0 and 1 for real positive arguments.

Three regimes, all vectorized over numpy arrays:

* ``x < 2``: ascending power series (no cancellation problem there).
* ``2 <= x < 25``: Steed's method, i.e. the continued fraction for
  ``J1'/J1`` combined with the complex continued fraction for
  ``(J1' + i Y1') / (J1 + i Y1)`` and the Wronskian.
* ``x >= 25``: Hankel's asymptotic expansion; the truncation error there
  is below ``exp(-2x) ~ 2e-22``.

Only orders 0 and 1 are provided. Order 0 is carried along because the
standard derivative recurrences ``J1' = J0 - J1/x`` need it.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError

__all__ = [
    "SERIES_CUTOFF",
    "ASYMPTOTIC_CUTOFF",
    "bessel_jy",
    "bessel_j0",
    "bessel_j1",
    "bessel_y0",
    "bessel_y1",
    "bessel_j1_prime",
    "bessel_y1_prime",
    "hankel2_1",
    "hankel2_1_prime",
]

SERIES_CUTOFF = 2.0
ASYMPTOTIC_CUTOFF = 25.0

_EULER_GAMMA = 0.57721566490153286060651209
_EPS = 1e-16
_FPMIN = 1e-300
_MAXIT = 100_000
_N_SERIES = 30


def _as_positive_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Bessel argument must be finite")
    if np.any(arr <= 0.0):
        raise DomainError("Bessel argument must be strictly positive")
    return arr, scalar


def _series(x: np.ndarray):
    """Ascending series for J0, J1, Y0, Y1 (accurate for x < 2)."""
    h = 0.5 * x
    h2 = h * h
    j0 = np.zeros_like(x)
    j1 = np.zeros_like(x)
    s0 = np.zeros_like(x)  # sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2
    s1 = np.zeros_like(x)  # sum_{k>=0} (-1)^k (psi(k+1)+psi(k+2)) h^{2k+1} / (k!(k+1)!)
    t0 = np.ones_like(x)   # (-1)^k h^{2k} / (k!)^2
    t1 = h.copy()          # (-1)^k h^{2k+1} / (k!(k+1)!)
    harmonic = 0.0         # H_k
    for k in range(_N_SERIES):
        if k > 0:
            t0 = -t0 * h2 / (k * k)
            t1 = -t1 * h2 / (k * (k + 1))
            harmonic += 1.0 / k
        j0 += t0
        j1 += t1
        if k > 0:
            s0 -= harmonic * t0
        psi_sum = 2.0 * (harmonic - _EULER_GAMMA) + 1.0 / (k + 1)
        s1 += psi_sum * t1
    log_h = np.log(h)
    y0 = (2.0 / math.pi) * ((log_h + _EULER_GAMMA) * j0 + s0)
    y1 = (2.0 / math.pi) * j1 * log_h - 2.0 / (math.pi * x) - s1 / math.pi
    return j0, j1, y0, y1


def _steed(x: np.ndarray):
    """Steed's method for order one; returns J0, J1, Y0, Y1 (x >= 2)."""
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / math.pi

    # CF1: f = J1'/J1, sign of J1 tracked through the denominators
    isign = np.ones_like(x)
    h = xi.copy()
    b = xi2.copy()
    d = np.zeros_like(x)
    c = h.copy()
    active = np.ones(x.shape, dtype=bool)
    for _ in range(_MAXIT):
        b = np.where(active, b + xi2, b)
        dn = b - d
        dn = np.where(np.abs(dn) < _FPMIN, _FPMIN, dn)
        cn = b - 1.0 / c
        cn = np.where(np.abs(cn) < _FPMIN, _FPMIN, cn)
        dn = 1.0 / dn
        delta = cn * dn
        h = np.where(active, delta * h, h)
        isign = np.where(active & (dn < 0.0), -isign, isign)
        d = np.where(active, dn, d)
        c = np.where(active, cn, c)
        active &= np.abs(delta - 1.0) >= _EPS
        if not active.any():
            break
    else:  # pragma: no cover - only reachable for absurd arguments
        raise DomainError("Bessel continued fraction CF1 did not converge")
    f = h

    # CF2 (Steed): p + i q = (J1' + i Y1') / (J1 + i Y1)
    a = np.full_like(x, 0.25 - 1.0)
    p = -0.5 * xi
    q = np.ones_like(x)
    br = 2.0 * x
    bi = np.full_like(x, 2.0)
    fact = a * xi / (p * p + q * q)
    cr = br + q * fact
    ci = bi + p * fact
    den = br * br + bi * bi
    dr = br / den
    di = -bi / den
    dlr = cr * dr - ci * di
    dli = cr * di + ci * dr
    p, q = p * dlr - q * dli, p * dli + q * dlr
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _MAXIT):
        a = a + 2 * i
        bi = bi + 2.0
        dr = a * dr + br
        di = a * di + bi
        dr = np.where(np.abs(dr) + np.abs(di) < _FPMIN, _FPMIN, dr)
        fact = a / (cr * cr + ci * ci)
        cr = br + cr * fact
        ci = bi - ci * fact
        cr = np.where(np.abs(cr) + np.abs(ci) < _FPMIN, _FPMIN, cr)
        den = dr * dr + di * di
        dr = dr / den
        di = -di / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        pn = p * dlr - q * dli
        qn = p * dli + q * dlr
        p = np.where(active, pn, p)
        q = np.where(active, qn, q)
        active &= np.abs(dlr - 1.0) + np.abs(dli) >= _EPS
        if not active.any():
            break
    else:  # pragma: no cover
        raise DomainError("Bessel continued fraction CF2 did not converge")

    gam = (p - f) / q
    j1 = isign * np.sqrt(w / ((p - f) * gam + q))
    y1 = gam * j1
    j1p = f * j1
    y1p = y1 * p + j1 * q
    j0 = j1 * xi + j1p
    y0 = y1 * xi + y1p
    return j0, j1, y0, y1


def _hankel_pq(x: np.ndarray, order: int):
    mu = 4.0 * order * order
    term = np.ones_like(x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    prev = np.full_like(x, np.inf)
    live = np.ones(x.shape, dtype=bool)
    for k in range(1, 80):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        # stop each element once the (divergent) series stops decreasing
        live &= (mag < prev) & (mag > 1e-18)
        if not live.any():
            break
        sign = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 0:
            p = np.where(live, p + sign * term, p)
        else:
            q = np.where(live, q + sign * term, q)
        prev = mag
    return p, q


def _asymptotic(x: np.ndarray):
    amp = np.sqrt(2.0 / (math.pi * x))
    s, c = np.sin(x), np.cos(x)
    r2 = math.sqrt(0.5)
    # chi = x - pi/4 (order 0), x - 3pi/4 (order 1), expanded by angle addition
    cos0, sin0 = (c + s) * r2, (s - c) * r2
    cos1, sin1 = (s - c) * r2, -(s + c) * r2
    p0, q0 = _hankel_pq(x, 0)
    p1, q1 = _hankel_pq(x, 1)
    j0 = amp * (p0 * cos0 - q0 * sin0)
    y0 = amp * (p0 * sin0 + q0 * cos0)
    j1 = amp * (p1 * cos1 - q1 * sin1)
    y1 = amp * (p1 * sin1 + q1 * cos1)
    return j0, j1, y0, y1


def _jy(x: np.ndarray):
    out = [np.empty_like(x) for _ in range(4)]
    lo = x < SERIES_CUTOFF
    hi = x >= ASYMPTOTIC_CUTOFF
    mid = ~(lo | hi)
    for mask, fn in ((lo, _series), (mid, _steed), (hi, _asymptotic)):
        if mask.any():
            for dst, val in zip(out, fn(x[mask])):
                dst[mask] = val
    return tuple(out)


def _finish(arr: np.ndarray, scalar: bool):
    return arr[0].item() if scalar else arr


def bessel_jy(x):
    """Return ``(J0, J1, Y0, Y1)`` evaluated at ``x > 0``."""
    arr, scalar = _as_positive_array(x)
    return tuple(_finish(v, scalar) for v in _jy(arr))


def bessel_j0(x):
    arr, scalar = _as_positive_array(x)
    return _finish(_jy(arr)[0], scalar)


def bessel_j1(x):
    """Bessel function of the first kind, order one, for finite ``x > 0``.

    >>> round(bessel_j1(1.0), 10)
    0.4400505857
    """
    arr, scalar = _as_positive_array(x)
    return _finish(_jy(arr)[1], scalar)


def bessel_y0(x):
    arr, scalar = _as_positive_array(x)
    return _finish(_jy(arr)[2], scalar)


def bessel_y1(x):
    """Bessel function of the second kind, order one, for finite ``x > 0``."""
    arr, scalar = _as_positive_array(x)
    return _finish(_jy(arr)[3], scalar)


def bessel_j1_prime(x):
    """``J1'(x) = J0(x) - J1(x)/x``."""
    arr, scalar = _as_positive_array(x)
    j0, j1, _, _ = _jy(arr)
    return _finish(j0 - j1 / arr, scalar)


def bessel_y1_prime(x):
    """``Y1'(x) = Y0(x) - Y1(x)/x``."""
    arr, scalar = _as_positive_array(x)
    _, _, y0, y1 = _jy(arr)
    return _finish(y0 - y1 / arr, scalar)


def hankel2_1(x):
    """Hankel function of the second kind, order one: ``J1(x) - i Y1(x)``."""
    arr, scalar = _as_positive_array(x)
    _, j1, _, y1 = _jy(arr)
    return _finish(j1 - 1j * y1, scalar)


def hankel2_1_prime(x):
    """Derivative ``d/dx H1^(2)(x) = H0^(2)(x) - H1^(2)(x)/x``."""
    arr, scalar = _as_positive_array(x)
    j0, j1, y0, y1 = _jy(arr)
    h0 = j0 - 1j * y0
    h1 = j1 - 1j * y1
    return _finish(h0 - h1 / arr, scalar)
