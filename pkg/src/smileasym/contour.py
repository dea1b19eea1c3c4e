"""Fourier inversion along shifted contours, evaluated in log space.

A distribution is described by its log moment generating function
``logm(z) = log E[exp(z X)]``, analytic on a vertical strip ``lo < Re z < hi``.
For a payoff whose transform has poles on the imaginary axis, the expectation
is an integral along ``Re z = nu`` for any admissible ``nu``.  Choosing ``nu`` at
the saddle point of the integrand makes the result accurate in *relative* terms
even when it is astronomically small, which is what the wing asymptotics need.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .errors import AccuracyError, DomainError

LogMgf = Callable[[complex], complex]


@dataclass(frozen=True)
class ContourResult:
    log_value: float
    abs_error: float       # absolute error of exp(log_value)
    shift: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value > -745.0 else 0.0


def dlogm(logm: LogMgf, nu: float) -> float:
    """Derivative of a real-analytic log mgf by a central complex step.

    The step is not tiny because some exponents (Heston) carry an O(eps)
    imaginary residue on the real axis; the central form cancels it to O(h^2).
    """
    h = 1e-7 * max(1.0, abs(nu))
    return (logm(complex(nu, h)) - logm(complex(nu, -h))).imag / (2.0 * h)


def d2logm(logm: LogMgf, nu: float, lo: float, hi: float) -> float:
    step = 1e-4 * max(1.0, abs(nu))
    if math.isfinite(lo):
        step = min(step, 0.5 * (nu - lo))
    if math.isfinite(hi):
        step = min(step, 0.5 * (hi - nu))
    return (dlogm(logm, nu + step) - dlogm(logm, nu - step)) / (2.0 * step)


def saddle_shift(logm: LogMgf, k: float, a: float, b: float, poles: tuple[float, ...]) -> float:
    """Minimiser over nu in (a, b) of logm(nu) - nu*k - sum(log|nu - p|).

    Ends that are poles give an interior minimum automatically.  Infinite ends
    are expanded geometrically.  A finite end that is not a pole acts as a cap.
    """
    def g(nu: float) -> float:
        return dlogm(logm, nu) - k - sum(1.0 / (nu - p) for p in poles)

    def inner(end: float, other: float) -> float:
        span = abs(other - end)
        if not math.isfinite(span):
            span = 1.0
        return end + math.copysign(min(1e-9, 1e-6 * span) * max(1.0, abs(end)), other - end)

    if math.isinf(a):
        left = (b - 1.0) if math.isfinite(b) else -1.0
        width = 1.0
        while g(left) > 0.0:
            width *= 2.0
            left = (b if math.isfinite(b) else 0.0) - width
            if width > 1e300:
                raise AccuracyError("saddle search diverged to -inf")
    else:
        left = inner(a, b)
    if math.isinf(b):
        right = (a + 1.0) if math.isfinite(a) else 1.0
        width = 1.0
        while g(right) < 0.0:
            width *= 2.0
            right = (a if math.isfinite(a) else 0.0) + width
            if width > 1e300:
                raise AccuracyError("saddle search diverged to +inf")
    else:
        right = inner(b, a)
    gl, gr = g(left), g(right)
    if gl >= 0.0:
        return left
    if gr <= 0.0:
        return right
    return brentq(g, left, right, xtol=1e-14 * max(1.0, abs(left), abs(right)), maxiter=300)


def _panel_integral(f: Callable[[float], float], env: Callable[[float], float],
                    width: float, scale_hint: float, max_panels: int = 80):
    """Integral of f over [0, inf) on geometrically growing panels."""
    total, err = 0.0, 0.0
    lo, hi = 0.0, width
    for _ in range(max_panels):
        tol = 1e-15 * max(abs(total), scale_hint)
        with warnings.catch_warnings():
            # the error estimate is accumulated and reported instead
            warnings.simplefilter("ignore", IntegrationWarning)
            val, e = quad(f, lo, hi, epsabs=tol, epsrel=1e-13, limit=1000)
        total += val
        err += e
        if hi > 4.0 * width and env(hi) * hi < 1e-17 * max(abs(total), 1e-300) \
                and abs(val) <= 1e-16 * max(abs(total), 1e-300) + e:
            return total, err
        lo, hi = hi, 2.0 * hi
    raise AccuracyError("oscillatory integral did not settle", achieved=err)


def shifted_integral(logm: LogMgf, k: float, nu: float, kernel: Callable[[complex], complex],
                     width: float, log_prefactor: float = 0.0) -> ContourResult:
    """(1/pi) * Int_0^inf Re[kernel(u + i nu) e^{iuk} M(nu - iu)] du * exp(-nu k + prefactor).

    Returned in log form; the sign of the integral must be positive.
    """
    base = logm(complex(nu, 0.0)).real

    def integrand(u: float) -> float:
        w = logm(complex(nu, -u)) - base + 1j * u * k
        return (kernel(complex(u, nu)) * np.exp(w)).real

    def envelope(u: float) -> float:
        w = logm(complex(nu, -u)).real - base
        return abs(kernel(complex(u, nu))) * math.exp(min(w, 700.0))

    hint = abs(kernel(complex(0.0, nu))) * width
    total, err = _panel_integral(integrand, envelope, width, hint)
    if not total > 0.0:
        raise AccuracyError(f"contour integral not positive ({total:g})", achieved=err)
    log_scale = base - nu * k + log_prefactor - math.log(math.pi)
    log_value = log_scale + math.log(total)
    abs_err = math.exp(log_scale) * err if log_scale < 700 else math.inf
    return ContourResult(log_value, abs_err, nu)


def _width(logm: LogMgf, nu: float, lo: float, hi: float, poles) -> float:
    c2 = d2logm(logm, nu, lo, hi)
    w = 1.0 / math.sqrt(c2) if c2 > 0.0 and math.isfinite(c2) else 1.0
    for p in poles:
        w = min(w, abs(nu - p))
    return w


def right_tail(logm: LogMgf, k: float, lo: float, hi: float, nu: float | None = None) -> ContourResult:
    """P(X > k) using a contour with 0 < nu < hi."""
    if hi <= 0.0:
        raise DomainError("right tail needs moments of positive order")
    if nu is None:
        nu = saddle_shift(logm, k, 0.0, hi, (0.0,))
    if not 0.0 < nu < hi:
        raise DomainError(f"shift {nu} outside (0, {hi})")
    w = _width(logm, nu, lo, hi, (0.0,))
    return shifted_integral(logm, k, nu, lambda z: 1j / z, w)


def left_tail(logm: LogMgf, k: float, lo: float, hi: float, nu: float | None = None) -> ContourResult:
    """P(X < k) using a contour with lo < nu < 0."""
    if lo >= 0.0:
        raise DomainError("left tail contour needs moments of negative order")
    if nu is None:
        nu = saddle_shift(logm, k, lo, 0.0, (0.0,))
    if not lo < nu < 0.0:
        raise DomainError(f"shift {nu} outside ({lo}, 0)")
    w = _width(logm, nu, lo, hi, (0.0,))
    return shifted_integral(logm, k, nu, lambda z: -1j / z, w)


def otm_option(logm: LogMgf, kappa: float, lo: float, hi: float,
               nu: float | None = None) -> ContourResult:
    """Out-of-the-money option on e^X with log-strike kappa.

    With nu > 1 the integral is the call, with nu < 0 it is the put.
    """
    if nu is None:
        if kappa >= 0.0:
            if hi <= 1.0:
                raise DomainError("call contour needs moments above order 1")
            nu = saddle_shift(logm, kappa, 1.0, hi, (0.0, 1.0))
        else:
            if lo >= 0.0:
                raise DomainError("put contour needs moments of negative order")
            nu = saddle_shift(logm, kappa, lo, 0.0, (0.0, 1.0))
    if not (lo < nu < hi) or 0.0 <= nu <= 1.0:
        raise DomainError(f"shift {nu} not admissible for an OTM contour")
    w = _width(logm, nu, lo, hi, (0.0, 1.0))
    return shifted_integral(logm, kappa, nu, lambda z: -1.0 / (z * z - 1j * z), w,
                            log_prefactor=kappa)


def lewis_call(logm: LogMgf, kappa: float, nu: float = 0.5) -> tuple[float, float]:
    """Call price from a contour 0 < nu < 1 (residue at the spot added back).

    Returns (price, abs_error).
    """
    if not 0.0 < nu < 1.0:
        raise DomainError("Lewis contour needs 0 < nu < 1")
    base = logm(complex(nu, 0.0)).real

    def integrand(u: float) -> float:
        z = complex(u, nu)
        w = logm(complex(nu, -u)) - base + 1j * u * kappa
        return (-1.0 / (z * z - 1j * z) * np.exp(w)).real

    def envelope(u: float) -> float:
        z = complex(u, nu)
        return abs(1.0 / (z * z - 1j * z)) * math.exp(min(logm(complex(nu, -u)).real - base, 700.0))

    w = _width(logm, nu, -math.inf, math.inf, (0.0, 1.0))
    total, err = _panel_integral(integrand, envelope, w, 1.0)
    scale = math.exp(base - nu * kappa + kappa) / math.pi
    return 1.0 + scale * total, scale * err


def gil_pelaez_cdf(logm: LogMgf, x: float, width: float) -> tuple[float, float]:
    """P(X <= x) = 1/2 - (1/pi) Int_0^inf Im[e^{-iux} phi(u)]/u du.  Returns (value, abs_error)."""
    def integrand(u: float) -> float:
        if u == 0.0:
            return 0.0
        return (np.exp(logm(complex(0.0, u)) - 1j * u * x)).imag / u

    def envelope(u: float) -> float:
        return math.exp(logm(complex(0.0, u)).real) / max(u, 1e-300)

    total, err = _panel_integral(integrand, envelope, width, 1.0)
    return 0.5 - total / math.pi, err / math.pi
