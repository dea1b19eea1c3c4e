"""Normalized Black-Scholes prices, their inverse, and price-to-vol asymptotics.

Spot is 1, rates are 0, ``kappa`` is the log-strike and ``v = sigma*sqrt(t)`` the
total volatility.  Prices of out-of-the-money options are available in log form
(``bs_log_otm``) so that strikes far in the wings do not underflow; the inverter
accepts the same representation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError
from .quote import AsymptoticQuote
from .specfun import (LOG_SQRT_2PI, SQRT_2PI, _mills, d_inv, gauss_cdf,
                      mills_complement, mills_complement_array)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)
# price form phi(d1) * (U(-d1) - U(-d1 + v)) is used below this d1
DEEP_OTM_D1 = -8.0


@dataclass(frozen=True)
class BsInputs:
    kappa: float
    v: float
    d1: float
    d2: float

    @classmethod
    def from_kv(cls, kappa: float, v: float) -> "BsInputs":
        if v <= 0.0:
            raise DomainError("d1, d2 need v > 0")
        d1 = -kappa / v + 0.5 * v
        return cls(kappa, v, d1, d1 - v)


@dataclass(frozen=True)
class OptionPrice:
    call: float
    put: float
    kappa: float
    t: float


@dataclass(frozen=True)
class VolQuote:
    sigma: float
    total_vol: float
    kappa: float
    t: float


def _mills_drop(x: float, v: float) -> float:
    """U(x) - U(x + v) for v > 0, accurate also when v << x."""
    if v <= 0.5 * max(x, 1.0):
        s = x + 0.5 * v * (_GL_X + 1.0)
        return 0.5 * v * float(np.dot(_GL_W, mills_complement_array(s)))
    return _mills(x) - _mills(x + v)


def _log_call_nonneg(kappa: float, v: float) -> float:
    """log C(kappa, v) for kappa >= 0 and v > 0."""
    d1 = -kappa / v + 0.5 * v
    x = -d1
    if v <= 0.5 * max(x, 1.0) or d1 < DEEP_OTM_D1:
        drop = _mills_drop(x, v)
        if drop <= 0.0:
            return -math.inf
        return -0.5 * d1 * d1 - LOG_SQRT_2PI + math.log(drop)
    c = gauss_cdf(d1) - math.exp(kappa) * gauss_cdf(d1 - v)
    return math.log(c) if c > 0.0 else -math.inf


def _check_v(v: float) -> float:
    v = float(v)
    if not (v >= 0.0) or math.isnan(v):
        raise DomainError(f"total volatility must be >= 0, got {v}")
    return v


def _intrinsic_call(kappa: float) -> float:
    return max(-math.expm1(kappa), 0.0)


def bs_log_otm(kappa: float, v: float) -> float:
    """Log price of the out-of-the-money option: call if kappa >= 0, else put."""
    kappa, v = float(kappa), _check_v(v)
    if v == 0.0:
        return -math.inf
    if math.isinf(v):
        return 0.0 if kappa >= 0.0 else kappa
    if kappa >= 0.0:
        return _log_call_nonneg(kappa, v)
    # put(kappa) = e^kappa * call(-kappa)
    return kappa + _log_call_nonneg(-kappa, v)


def bs_log_call(kappa: float, v: float) -> float:
    kappa, v = float(kappa), _check_v(v)
    if kappa >= 0.0:
        return bs_log_otm(kappa, v)
    return float(np.logaddexp(math.log(-math.expm1(kappa)), bs_log_otm(kappa, v)))


def bs_log_put(kappa: float, v: float) -> float:
    kappa, v = float(kappa), _check_v(v)
    if kappa <= 0.0:
        return bs_log_otm(kappa, v) if kappa < 0.0 else bs_log_otm(0.0, v)
    return float(np.logaddexp(math.log(math.expm1(kappa)), bs_log_otm(kappa, v)))


def bs_call_price(kappa: float, v: float) -> float:
    kappa, v = float(kappa), _check_v(v)
    if v == 0.0:
        return _intrinsic_call(kappa)
    if kappa >= 0.0:
        return math.exp(bs_log_otm(kappa, v))
    return -math.expm1(kappa) + math.exp(bs_log_otm(kappa, v))


def bs_put_price(kappa: float, v: float) -> float:
    kappa, v = float(kappa), _check_v(v)
    if v == 0.0:
        return max(math.expm1(kappa), 0.0)
    if kappa <= 0.0:
        return math.exp(bs_log_otm(kappa, v))
    return math.expm1(kappa) + math.exp(bs_log_otm(kappa, v))


def bs_prices(kappa: float, t: float, sigma: float) -> OptionPrice:
    v = sigma * math.sqrt(t)
    return OptionPrice(bs_call_price(kappa, v), bs_put_price(kappa, v), kappa, t)


def bs_log_call_asymptotic(kappa: float, v: float, regime: str) -> float:
    """log of the sharp small-price equivalents of the call price."""
    kappa, v = float(kappa), float(v)
    if kappa < 0.0 or v <= 0.0:
        raise DomainError("need kappa >= 0 and v > 0")
    d1 = -kappa / v + 0.5 * v
    log_pdf = -0.5 * d1 * d1 - LOG_SQRT_2PI
    if regime == "d1-to-minus-infinity":
        if d1 >= 0.0:
            raise RegimeError(f"d1 = {d1} is not negative")
        return log_pdf + math.log(v) - math.log(-d1) - math.log(-d1 + v)
    if regime == "v-to-zero":
        # -U'(-d1) = 1 + d1 U(-d1)
        return log_pdf + math.log(mills_complement(-d1)) + math.log(v)
    raise RegimeError(f"unknown regime {regime!r}")


def bs_call_asymptotic(kappa: float, v: float, regime: str) -> float:
    """Sharp small-price equivalents of the call price."""
    return math.exp(bs_log_call_asymptotic(kappa, v, regime))


# ---------------------------------------------------------------- inversion

def _invert_log_call_nonneg(kappa: float, target: float) -> float:
    """Total vol v with log C(kappa, v) = target, kappa >= 0, target < 0."""
    L = -target
    if kappa > 0.0:
        seed = math.sqrt(2.0 * (L + kappa)) - math.sqrt(2.0 * L)
    else:
        seed = SQRT_2PI * math.exp(target)
    seed = max(seed, 1e-300)

    def g(v: float) -> float:
        return _log_call_nonneg(kappa, v) - target

    lo, hi = seed, seed
    g_lo = g(lo)
    while g_lo > 0.0:
        lo *= 0.5
        g_lo = g(lo)
    g_hi = g_lo if lo == hi else g(hi)
    while g_hi < 0.0:
        hi *= 2.0
        g_hi = g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi

    # Newton on v, safeguarded by the bracket
    v = seed if lo <= seed <= hi else math.sqrt(lo * hi)
    for _ in range(200):
        gv = g(v)
        if gv == 0.0:
            return v
        if gv < 0.0:
            lo = v
        else:
            hi = v
        if abs(gv) < 1e-14 or (hi - lo) <= 4e-16 * hi:
            return v
        d1 = -kappa / v + 0.5 * v
        # d log C / dv = phi(d1) / C, with log C = gv + target
        log_slope = -0.5 * d1 * d1 - LOG_SQRT_2PI - (gv + target)
        slope = math.exp(log_slope) if log_slope < 700.0 else math.inf
        step = v - gv / slope if slope > 0.0 and math.isfinite(slope) else math.nan
        if not (lo < step < hi):
            step = math.sqrt(lo * hi) if lo > 0.0 else 0.5 * hi
        v = step
    return v


def bs_invert_log_otm(kappa: float, log_price: float) -> float:
    """Total vol from the log of the out-of-the-money price (call for kappa >= 0)."""
    kappa, log_price = float(kappa), float(log_price)
    if log_price == -math.inf:
        return 0.0
    upper = 0.0 if kappa >= 0.0 else kappa
    if not (log_price < upper):
        raise DomainError(f"log price {log_price} not below its upper bound {upper}")
    if kappa >= 0.0:
        return _invert_log_call_nonneg(kappa, log_price)
    return _invert_log_call_nonneg(-kappa, log_price - kappa)


def bs_invert_vol(kappa: float, c: float) -> float:
    """Total implied volatility V_BS(kappa, c) of a call price c."""
    kappa, c = float(kappa), float(c)
    intrinsic = _intrinsic_call(kappa)
    if not (intrinsic <= c < 1.0):
        raise DomainError(f"call price {c} outside [{intrinsic}, 1)")
    if c == intrinsic:
        return 0.0
    if kappa >= 0.0:
        return bs_invert_log_otm(kappa, math.log(c))
    return bs_invert_log_otm(kappa, math.log(c - intrinsic))


def implied_vol(kappa: float, t: float, call: float | None = None, *,
                put: float | None = None, log_otm: float | None = None) -> VolQuote:
    """Implied volatility from exactly one of a call, a put, or a log OTM price."""
    if t <= 0.0:
        raise DomainError("t must be positive")
    given = [x is not None for x in (call, put, log_otm)]
    if sum(given) != 1:
        raise DomainError("pass exactly one of call, put, log_otm")
    if log_otm is not None:
        v = bs_invert_log_otm(kappa, log_otm)
    elif put is not None and kappa < 0.0:
        # the put is the OTM side here: invert it directly, no parity round off
        v = bs_invert_log_otm(kappa, math.log(put)) if put > 0.0 else 0.0
    else:
        if put is not None:
            call = put - math.expm1(kappa)
        v = bs_invert_vol(kappa, call)
    return VolQuote(v / math.sqrt(t), v, float(kappa), float(t))


# ------------------------------------------------------ universal asymptotics

def _gap(a: float) -> float:
    # sqrt(a + 1) - sqrt(a) without cancellation
    return 1.0 / (math.sqrt(a + 1.0) + math.sqrt(a))


def price_to_vol_asymptotic(kappa: float, t: float, price: float | None = None,
                            branch: str = "otm", *,
                            log_price: float | None = None) -> AsymptoticQuote:
    """Implied volatility from a small option price.

    ``price`` is the out-of-the-money price (call for kappa > 0, put for kappa < 0,
    either for kappa = 0).  ``log_price`` may be given instead for prices below
    the floating-point range.
    """
    kappa, t = float(kappa), float(t)
    if t <= 0.0:
        raise DomainError("t must be positive")
    if log_price is None:
        if price is None or not (price > 0.0):
            raise DomainError(f"price must be positive, got {price}")
        log_price = math.log(price)
    elif log_price == -math.inf or math.isnan(log_price):
        raise DomainError("log price must be finite")
    echo = {"kappa": kappa, "t": t, "log_price": log_price}
    if branch == "otm":
        if kappa == 0.0:
            raise RegimeError("otm branch needs kappa != 0")
        k = abs(kappa)
        L = -log_price
        if kappa > 0.0:
            value = _gap(L / k) * math.sqrt(2.0 * k / t)
        else:
            if L / k < 1.0:
                raise RegimeError("put price above e^kappa")
            value = _gap(L / k - 1.0) * math.sqrt(2.0 * k / t)
        return AsymptoticQuote(value, "price-otm", "price -> 0 with kappa bounded away from 0", echo)
    if branch == "small-strike":
        if kappa == 0.0:
            raise RegimeError("small-strike branch needs kappa != 0")
        k = abs(kappa)
        z = d_inv(log_y=log_price - math.log(k))
        return AsymptoticQuote(k / (z * math.sqrt(t)), "price-small-strike",
                               "price -> 0 with kappa -> 0", echo)
    if branch == "atm":
        if kappa != 0.0:
            raise RegimeError("atm branch needs kappa = 0")
        return AsymptoticQuote(SQRT_2PI * math.exp(log_price) / math.sqrt(t), "price-atm",
                               "kappa = 0, price -> 0", echo)
    raise RegimeError(f"unknown branch {branch!r}")
