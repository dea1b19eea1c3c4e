"""Heston analytics: characteristic exponent, moment explosion, small-time rate function.

Parameters follow dS = S sqrt(V) dW1, dV = -lam (V - theta) dt + eta sqrt(V) dW2,
d<W1, W2> = rho dt, with V_0 = sigma0 (a variance).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import BoundaryCaseError, DomainError


@dataclass(frozen=True)
class Heston:
    lambda_h: float
    theta: float
    eta: float
    sigma0: float
    rho: float

    def __post_init__(self):
        for name in ("lambda_h", "theta", "eta", "sigma0"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"Heston {name} must be positive")
        if not -1.0 <= self.rho <= 1.0:
            raise DomainError("Heston rho must lie in [-1, 1]")


@dataclass(frozen=True)
class HestonExplosion:
    p: float
    t_star: float
    chi: float
    disc: float
    c_const: float


def heston_log_mgf(m: Heston, z: complex, t: float) -> complex:
    """log E[exp(z X_t)] in a form that avoids the rotation-count branch problem.

    With beta = lam - rho eta z and d = sqrt(beta^2 - eta^2 (z^2 - z)) (principal root),
    B = (z^2 - z)(1 - e^{-dt}) / ((beta + d) - (beta - d) e^{-dt}) and
    A = lam theta / eta^2 * ((beta - d) t - 2 log(((beta + d) - (beta - d) e^{-dt}) / (2d))).
    """
    z = complex(z)
    lam, theta, eta = m.lambda_h, m.theta, m.eta
    beta = lam - m.rho * eta * z
    q = z * z - z
    d = cmath.sqrt(beta * beta - eta * eta * q)
    if abs(d) < 1e-10 * (abs(beta) + 1.0):
        # second-order expansion around d = 0
        b = q * t / (2.0 + beta * t)
        a = lam * theta / eta ** 2 * (beta * t - 2.0 * cmath.log(1.0 + 0.5 * beta * t))
        return a + b * m.sigma0
    e = cmath.exp(-d * t)
    den = (beta + d) - (beta - d) * e
    b = q * (1.0 - e) / den
    a = lam * theta / eta ** 2 * ((beta - d) * t - 2.0 * cmath.log(den / (2.0 * d)))
    return a + b * m.sigma0


def heston_constant(rho: float, eta: float) -> float:
    """C(rho, eta): limit of p * T*(p) as p -> inf."""
    if rho == -1.0:
        return math.inf
    if rho == 1.0:
        return 2.0 / eta
    rb = math.sqrt(1.0 - rho * rho)
    # atan2 folds in the +pi branch for rho < 0 and gives pi/2 at rho = 0
    return 2.0 / (eta * rb) * math.atan2(rb, rho)


def _t_star(m: Heston, p: float) -> tuple[float, float, float]:
    chi = m.rho * m.eta * p - m.lambda_h
    q = p * p - p
    disc = chi * chi - m.eta ** 2 * q
    if disc >= 0.0:
        if chi == 0.0:
            raise BoundaryCaseError(f"chi(p) = 0 with nonnegative discriminant at p = {p}")
        if chi < 0.0:
            return math.inf, chi, disc
        s = math.sqrt(disc)
        if s == 0.0:
            return 2.0 / chi, chi, disc
        # log((chi + s)/(chi - s)) written without the cancellation in chi - s
        return math.log1p(2.0 * s * (chi + s) / (m.eta ** 2 * q)) / s, chi, disc
    s = math.sqrt(-disc)
    return 2.0 / s * math.atan2(s, chi), chi, disc


def heston_explosion_time(m: Heston, p: float) -> HestonExplosion:
    """T*(p): the maturity at which E[S^p] first becomes infinite, for p > 1."""
    p = float(p)
    if not p > 1.0:
        raise DomainError("explosion time is defined here for p > 1")
    c = heston_constant(m.rho, m.eta)
    if m.rho == -1.0:
        chi = -m.eta * p - m.lambda_h
        return HestonExplosion(p, math.inf, chi, chi * chi - m.eta ** 2 * (p * p - p), c)
    ts, chi, disc = _t_star(m, p)
    return HestonExplosion(p, ts, chi, disc, c)


def _explosion_root(m: Heston, t: float, sign: int) -> float:
    # 1/T* increases from 0 as |p| moves away from [0, 1]; solve 1/T* = 1/t in log-distance
    anchor = 1.0 if sign > 0 else 0.0

    def h(w: float) -> float:
        p = anchor + sign * math.exp(w)
        return 1.0 / _t_star(m, p)[0] - 1.0 / t

    c = heston_constant(m.rho, m.eta)
    guess = c / t if math.isfinite(c) else 1.0 / t
    hi = math.log(max(guess, 1.0) * 4.0)
    while h(hi) < 0.0:
        hi += 2.0
        if hi > 300.0:
            # no explosion on this side within any representable order
            return sign * math.inf
    lo = hi - 2.0
    while h(lo) > 0.0:
        lo -= 2.0
        if lo < -700.0:
            break
    w = brentq(h, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=500)
    return anchor + sign * math.exp(w)


def heston_explosion_moment(m: Heston, t: float) -> float:
    """p*(t) > 1 with T*(p*) = t; +inf when rho = -1."""
    if not t > 0.0:
        raise DomainError("t must be positive")
    if m.rho == -1.0:
        return math.inf
    return _explosion_root(m, t, +1)


def heston_negative_explosion_moment(m: Heston, t: float) -> float:
    """The lower end p_-(t) < 0 of the finite-moment strip."""
    if not t > 0.0:
        raise DomainError("t must be positive")
    return _explosion_root(m, t, -1)


def _rho_bar_cot(rb: float, y: complex) -> complex:
    # rb * cot(rb * y), continuous down to rb = 0 where it equals 1/y
    w = rb * y
    if abs(w) < 1e-8:
        return (1.0 - w * w / 3.0) / y
    return cmath.cos(w) * rb / cmath.sin(w)


def heston_rate(m: Heston, p: complex) -> complex:
    """Lambda(p) = sigma0 p / (eta (rb cot(eta rb p / 2) - rho)) for 0 <= p < C, else +inf."""
    pr = p.real if isinstance(p, complex) else float(p)
    c = heston_constant(m.rho, m.eta)
    if pr < 0.0:
        raise DomainError("rate function used on p >= 0 only")
    if pr >= c:
        return math.inf
    if p == 0:
        return 0.0
    rb = math.sqrt(max(0.0, 1.0 - m.rho ** 2))
    g = _rho_bar_cot(rb, 0.5 * m.eta * p) - m.rho
    val = m.sigma0 * p / (m.eta * g)
    return val if isinstance(p, complex) else float(val.real)


def _rate_slope(m: Heston, p: float) -> float:
    h = 1e-30 * max(1.0, p)
    return heston_rate(m, complex(p, h)).imag / h


def heston_rate_dual(m: Heston, kappa: float) -> float:
    """Lambda*(kappa) = sup_{0 <= p < C} (p kappa - Lambda(p)) for kappa >= 0."""
    kappa = float(kappa)
    if kappa < 0.0:
        raise DomainError("dual rate function used on kappa >= 0 only")
    if kappa == 0.0:
        return 0.0
    c = heston_constant(m.rho, m.eta)
    lo = 1e-12
    if math.isfinite(c):
        hi = c * (1.0 - 1e-15)
    else:
        # rho = -1: Lambda grows linearly with slope sigma0/eta
        if kappa >= m.sigma0 / m.eta:
            return math.inf
        hi = 1.0
        while _rate_slope(m, hi) < kappa:
            hi *= 2.0
    if _rate_slope(m, lo) >= kappa:
        p = lo
    else:
        p = brentq(lambda x: _rate_slope(m, x) - kappa, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=500)
    return p * kappa - float(heston_rate(m, p))


def heston_rate_function(m: Heston, argument: float, dual: bool = False) -> float:
    """Lambda(argument), or Lambda*(argument) when ``dual`` is set."""
    if dual:
        return heston_rate_dual(m, argument)
    return float(heston_rate(m, float(argument)))
