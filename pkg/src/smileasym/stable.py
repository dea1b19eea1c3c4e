"""The totally skewed (beta = -1) strictly stable law used by the Carr-Wu model.

Y has characteristic function exp(-|u|^a (1 + i sign(u) tan(pi a/2))), so its
moment generating function exp(-z^a / cos(pi a/2)) is finite for z >= 0: the
right tail is thinner than exponential while the left tail is a power law.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gamma

from . import contour
from .errors import DomainError

# beyond this distance to the left the leading power law replaces quadrature
LEFT_ASYMPTOTIC_SWITCH = 1000.0


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (1, 2], got {alpha}")
    return alpha


def stable_logmgf(alpha: float):
    """log E[exp(zY)] = -z^alpha / cos(pi alpha / 2) on Re z >= 0 (principal power)."""
    alpha = _check_alpha(alpha)
    c = math.cos(0.5 * math.pi * alpha)

    def logm(z: complex) -> complex:
        return -(complex(z) ** alpha) / c
    return logm


def stable_cf(u, alpha: float):
    alpha = _check_alpha(alpha)
    u = np.asarray(u, dtype=float)
    return np.exp(-np.abs(u) ** alpha * (1.0 + 1j * np.sign(u) * math.tan(0.5 * math.pi * alpha)))


def left_tail_constant(alpha: float) -> float:
    """c_alpha with P(Y <= -y) ~ c_alpha * y^-alpha as y -> inf."""
    alpha = _check_alpha(alpha)
    return 2.0 * float(gamma(alpha)) * math.sin(0.5 * math.pi * alpha) / math.pi


def right_tail_rate(alpha: float) -> float:
    """B~_alpha with log P(Y > y) ~ -B~_alpha * y^(alpha/(alpha-1))."""
    alpha = _check_alpha(alpha)
    return (alpha - 1.0) / alpha * (abs(math.cos(0.5 * math.pi * alpha)) / alpha) ** (1.0 / (alpha - 1.0))


def _gp_cdf(x: float, alpha: float) -> tuple[float, float]:
    return contour.gil_pelaez_cdf(stable_logmgf(alpha), x, 1.0)


def stable_log_sf(x: float, alpha: float) -> tuple[float, float, str]:
    """(log P(Y > x), absolute error of P, method tag)."""
    alpha = _check_alpha(alpha)
    x = float(x)
    if x > 0.0:
        r = contour.right_tail(stable_logmgf(alpha), x, 0.0, math.inf)
        return r.log_value, r.abs_error, "quadrature"
    f, err = _gp_cdf(x, alpha)
    return math.log1p(-f), err, "quadrature"


def stable_log_cdf(x: float, alpha: float,
                   left_switch: float = LEFT_ASYMPTOTIC_SWITCH) -> tuple[float, float, str]:
    """(log P(Y <= x), absolute error of P, method tag)."""
    alpha = _check_alpha(alpha)
    x = float(x)
    if x < -left_switch:
        c = left_tail_constant(alpha)
        if c == 0.0:
            # alpha = 2 has no power tail; the Gaussian N(0, 2) is exact
            from scipy.special import log_ndtr
            return float(log_ndtr(x / math.sqrt(2.0))), 0.0, "closed-sum"
        log_val = math.log(c) - alpha * math.log(-x)
        # next term of the tail expansion is of relative order |x|^-alpha
        return log_val, math.exp(log_val) * (-x) ** (-alpha), "asymptotic"
    if x <= 0.0:
        f, err = _gp_cdf(x, alpha)
        return math.log(f), err, "quadrature"
    log_sf, err, method = stable_log_sf(x, alpha)
    return math.log1p(-math.exp(log_sf)), err, method


def stable_cdf(x: float, alpha: float, left_switch: float = LEFT_ASYMPTOTIC_SWITCH) -> float:
    """CDF of the unit-scale beta = -1 stable law."""
    return math.exp(stable_log_cdf(x, alpha, left_switch)[0])


def stable_call(b: float, alpha: float, scale: float = 1.0) -> tuple[float, float]:
    """E[(scale*Y - b)^+] and an absolute error, by a shifted-contour transform."""
    alpha = _check_alpha(alpha)
    base = stable_logmgf(alpha)

    def logm(z: complex) -> complex:
        return base(scale * z)

    nu = contour.saddle_shift(logm, b, 0.0, math.inf, (0.0, 0.0))
    w = contour._width(logm, nu, 0.0, math.inf, (0.0,))
    r = contour.shifted_integral(logm, b, nu, lambda z: -1.0 / (z * z), w)
    return r.value, r.abs_error


def stable_sample(alpha: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Chambers-Mallows-Stuck draws of the unit-scale beta = -1 law."""
    alpha = _check_alpha(alpha)
    beta = -1.0
    tan_a = math.tan(0.5 * math.pi * alpha)
    b = math.atan(beta * tan_a) / alpha
    s = (1.0 + beta * beta * tan_a * tan_a) ** (1.0 / (2.0 * alpha))
    v = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    w = rng.standard_exponential(size)
    ab = alpha * (v + b)
    return s * np.sin(ab) / np.cos(v) ** (1.0 / alpha) * (np.cos(v - ab) / w) ** ((1.0 - alpha) / alpha)
