"""Gaussian density/CDF, the Mills ratio U, and the function D with its inverse.

Everything is double precision.  Deep tails are handled through ``erfc``/``erfcx``
and, for large arguments, the Laplace continued fraction of the Mills ratio.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfcx, log_ndtr

from .errors import AccuracyError, DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# above this the Mills ratio comes from the continued fraction
MILLS_CF_SWITCH = 30.0
# the complement 1 - zU(z) uses the continued fraction already from here
_W_CF_SWITCH = 10.0
_CF_TERMS = 24  # exact to double precision for z >= 10 (15 terms already suffice)


@dataclass(frozen=True)
class GaussPoint:
    z: float
    pdf: float
    cdf: float


@dataclass(frozen=True)
class MillsValue:
    z: float
    u: float
    u_prime: float


@dataclass(frozen=True)
class DValue:
    z: float
    d: float


def _finite(z: float, name: str = "z") -> float:
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"{name} must be finite, got {z}")
    return z


def gauss_pdf(z: float) -> float:
    z = _finite(z)
    return math.exp(-0.5 * z * z) / SQRT_2PI


def gauss_cdf(z: float) -> float:
    z = _finite(z)
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def gauss_logcdf(z: float) -> float:
    """log Phi(z), finite far into the left tail."""
    return float(log_ndtr(_finite(z)))


def gauss_point(z: float) -> GaussPoint:
    return GaussPoint(float(z), gauss_pdf(z), gauss_cdf(z))


def _cf_tail(z: float) -> float:
    # r = 1/(z + 2/(z + 3/(z + ...))) so that U(z) = 1/(z + r)
    r = 0.0
    for k in range(_CF_TERMS, 1, -1):
        r = k / (z + r)
    return 1.0 / (z + r)


def _mills(z: float) -> float:
    if z > MILLS_CF_SWITCH:
        return 1.0 / (z + _cf_tail(z))
    return math.sqrt(math.pi / 2.0) * float(erfcx(z / math.sqrt(2.0)))


def mills_ratio(z: float) -> MillsValue:
    """U(z) = Phi(-z)/phi(z) together with U'(z) = zU(z) - 1."""
    z = _finite(z)
    u = _mills(z)
    return MillsValue(z, u, z * u - 1.0)


def mills_complement(z: float) -> float:
    """1 - zU(z) = -U'(z), free of cancellation for large z."""
    z = _finite(z)
    if z >= _W_CF_SWITCH:
        r = _cf_tail(z)
        return r / (z + r)
    return 1.0 - z * _mills(z)


def mills_complement_array(z: np.ndarray) -> np.ndarray:
    """Vectorised ``mills_complement``."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < _W_CF_SWITCH
    zs = z[small]
    out[small] = 1.0 - zs * math.sqrt(math.pi / 2.0) * erfcx(zs / math.sqrt(2.0))
    if small.all():
        return out
    zl = z[~small]
    r = np.zeros_like(zl)
    for k in range(_CF_TERMS, 1, -1):
        r = k / (zl + r)
    r = 1.0 / (zl + r)
    out[~small] = r / (zl + r)
    return out


def _check_positive(z: float) -> float:
    z = _finite(z)
    if z <= 0.0:
        raise DomainError(f"argument must be positive, got {z}")
    return z


def log_d_fn(z: float) -> float:
    """log D(z); stays finite where D itself underflows."""
    z = _check_positive(z)
    return -0.5 * z * z - LOG_SQRT_2PI + math.log(mills_complement(z)) - math.log(z)


def d_fn(z: float) -> float:
    """D(z) = phi(z)/z - Phi(-z) for z > 0."""
    z = _check_positive(z)
    if z < 1.0:
        # no cancellation worth the detour here, and phi(z)/z may be huge
        return gauss_pdf(z) / z - 0.5 * math.erfc(z / math.sqrt(2.0))
    if z > 37.0:
        return math.exp(log_d_fn(z))
    return gauss_pdf(z) * mills_complement(z) / z


def _d_seed(log_y: float) -> float:
    if log_y < 0.0:
        return math.sqrt(-2.0 * log_y)
    return math.exp(-log_y) / SQRT_2PI


def d_inv(y: float | None = None, *, log_y: float | None = None) -> float:
    """Inverse of D.  Pass ``log_y`` when y itself is not representable."""
    if log_y is None:
        if y is None:
            raise DomainError("need y or log_y")
        y = float(y)
        if not (y > 0.0) or not math.isfinite(y):
            raise DomainError(f"y must be positive and finite, got {y}")
        log_y = math.log(y)
    log_y = _finite(log_y, "log_y")

    def f(z: float) -> float:
        return log_d_fn(z) - log_y

    s = _d_seed(log_y)
    lo, hi = max(1e-8, s / 10.0), 10.0 * s
    if lo >= hi:
        lo = s / 10.0
    while f(lo) <= 0.0:
        lo /= 10.0
        if lo < 1e-320:
            raise AccuracyError("d_inv: failed to bracket from below")
    for _ in range(400):
        if f(hi) < 0.0:
            break
        hi *= 10.0
    else:
        raise AccuracyError("d_inv: failed to bracket from above")
    # solve in log z so tiny roots keep full relative precision
    w = brentq(lambda w: f(math.exp(w)), math.log(lo), math.log(hi),
               xtol=1e-16, rtol=8.9e-16, maxiter=500)
    return math.exp(w)


def d_value(z: float) -> DValue:
    return DValue(float(z), d_fn(z))
