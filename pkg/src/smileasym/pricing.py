"""Option-price oracles that do not use any asymptotic formula.

Three independent routes: Fourier inversion of the model transform, the
Poisson mixture of Black-Scholes prices for Merton, and Monte Carlo.  Prices
of out-of-the-money options are also reported as logarithms so that strikes
deep in the wings stay usable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from . import contour
from .blackscholes import bs_log_call, bs_log_put
from .errors import DomainError
from .models import (BlackScholes, CarrWu, Heston, Merton, ModelSpec, contour_strip,
                     log_mgf_fn)
from .stable import stable_sample

MC_BLOCK = 1 << 16
HESTON_STEPS = 256


@dataclass(frozen=True)
class PriceResult:
    price: float                 # call price
    method: str
    abs_error_bound: float
    mc_std_error: float | None = None
    seed: int | None = None
    log_price: float | None = None   # log of the OTM price: call if kappa >= 0, else put
    kappa: float | None = None


def _from_otm(kappa: float, log_otm: float, method: str, err: float, **kw) -> PriceResult:
    otm = math.exp(log_otm) if log_otm > -745.0 else 0.0
    call = otm if kappa >= 0.0 else otm - math.expm1(kappa)
    return PriceResult(call, method, err, log_price=log_otm, kappa=kappa, **kw)


def put_from_call(res: PriceResult) -> float:
    """Put price by parity p = c - (1 - e^kappa)."""
    if res.kappa is None:
        raise DomainError("price result carries no strike")
    if res.kappa < 0.0 and res.log_price is not None:
        return math.exp(res.log_price)
    return res.price + math.expm1(res.kappa)


# ------------------------------------------------------------------ Fourier

def fourier_call(m: ModelSpec, kappa: float, t: float, damping: float | None = None) -> PriceResult:
    """Call price by contour integration of the model transform.

    ``damping`` is the real part of the contour.  ``None`` picks the saddle of
    the out-of-the-money integrand, which keeps relative accuracy in the wings;
    a value in (0, 1) uses the contour between the two payoff poles.
    """
    kappa, t = float(kappa), float(t)
    if not t > 0.0:
        raise DomainError("t must be positive")
    logm = log_mgf_fn(m, t)
    lo, hi = contour_strip(m, t)
    if damping is not None:
        nu = float(damping)
        if not lo < nu < hi or nu in (0.0, 1.0):
            raise DomainError(f"damping {nu} outside the analyticity strip ({lo}, {hi})")
        if 0.0 < nu < 1.0:
            price, err = contour.lewis_call(logm, kappa, nu)
            otm = price if kappa >= 0.0 else price + math.expm1(kappa)
            log_otm = math.log(otm) if otm > 0.0 else -math.inf
            return PriceResult(price, "fourier", err, log_price=log_otm, kappa=kappa)
        r = contour.otm_option(logm, kappa, lo, hi, nu)
        if (nu > 1.0) == (kappa >= 0.0):
            return _from_otm(kappa, r.log_value, "fourier", r.abs_error)
        # contour gave the other option; convert through parity
        other = r.value
        call = other if nu > 1.0 else other - math.expm1(kappa)
        otm = call if kappa >= 0.0 else call + math.expm1(kappa)
        return PriceResult(call, "fourier", r.abs_error,
                           log_price=math.log(otm) if otm > 0.0 else -math.inf, kappa=kappa)
    if kappa >= 0.0 and hi <= 1.0:
        raise DomainError("no moments above order 1: call contour unavailable")
    if kappa < 0.0 and lo >= 0.0:
        # no negative moments (Carr-Wu): use the contour between the poles
        price, err = contour.lewis_call(logm, kappa, 0.5)
        otm = price + math.expm1(kappa)
        log_otm = math.log(otm) if otm > 0.0 else -math.inf
        return PriceResult(price, "fourier", err, log_price=log_otm, kappa=kappa)
    r = contour.otm_option(logm, kappa, lo, hi)
    return _from_otm(kappa, r.log_value, "fourier", r.abs_error)


# ------------------------------------------------------------ Merton mixture

def merton_series_price(m: Merton, kappa: float, t: float, M: int = 64) -> PriceResult:
    """Truncated Poisson mixture of Black-Scholes prices.

    Given n jumps, X_t is Gaussian with mean mu t + n alpha_j and variance
    sigma^2 t + n delta^2, so the option is a scaled Black-Scholes option.
    """
    kappa, t = float(kappa), float(t)
    if int(M) != M or M < 1:
        raise DomainError("M must be a positive integer")
    if not t > 0.0:
        raise DomainError("t must be positive")
    M = int(M)
    lt = m.lam * t
    n = np.arange(M + 1, dtype=float)
    logw = -lt + n * math.log(lt) - gammaln(n + 1.0)
    mean = m.mu * t + n * m.alpha_j
    var = m.sigma ** 2 * t + n * m.delta ** 2
    fwd = mean + 0.5 * var                      # log E[e^X | N = n]
    sd = np.sqrt(var)
    pricer = bs_log_call if kappa >= 0.0 else bs_log_put
    terms = np.array([pricer(kappa - f, s) for f, s in zip(fwd, sd)])
    log_otm = float(logsumexp(logw + fwd + terms))
    # omitted mass: under the share measure N is Poisson with mean lam t e^{alpha_j + delta^2/2}
    lt_share = lt * math.exp(m.alpha_j + 0.5 * m.delta ** 2)
    log_pref = (m.mu + 0.5 * m.sigma ** 2) * t - lt + lt_share
    if kappa >= 0.0:
        rem = math.exp(log_pref + M * (1.0 + math.log(lt_share) - math.log(M))) if M > math.e * lt_share else 1.0
    else:
        rem = math.exp(kappa + M * (1.0 + math.log(lt) - math.log(M))) if M > math.e * lt else 1.0
    otm = math.exp(log_otm) if log_otm > -745.0 else 0.0
    return _from_otm(kappa, log_otm, "closed-sum", rem + 1e-14 * otm)


# --------------------------------------------------------------- Monte Carlo

def _block_rng(seed: int, block: int) -> np.random.Generator:
    # one counter-based stream per (seed, block): results do not depend on how blocks are scheduled
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def sample_log_returns(m: ModelSpec, t: float, size: int, rng: np.random.Generator,
                       steps: int = HESTON_STEPS) -> np.ndarray:
    """Draws of X_t under the risk-neutral measure."""
    if isinstance(m, BlackScholes):
        s = m.sigma * math.sqrt(t)
        return -0.5 * s * s + s * rng.standard_normal(size)
    if isinstance(m, Merton):
        n = rng.poisson(m.lam * t, size)
        z = rng.standard_normal((2, size))
        return m.mu * t + m.sigma * math.sqrt(t) * z[0] + n * m.alpha_j + m.delta * np.sqrt(n) * z[1]
    if isinstance(m, CarrWu):
        return m.mu * t + m.sigma * t ** (1.0 / m.alpha) * stable_sample(m.alpha, size, rng)
    if isinstance(m, Heston):
        # full truncation Euler for the variance, exact-in-log step for the price
        dt = t / steps
        sq = math.sqrt(dt)
        rb = math.sqrt(max(0.0, 1.0 - m.rho ** 2))
        x = np.zeros(size)
        v = np.full(size, m.sigma0)
        for _ in range(steps):
            z1 = rng.standard_normal(size)
            z2 = m.rho * z1 + rb * rng.standard_normal(size)
            vp = np.maximum(v, 0.0)
            sv = np.sqrt(vp)
            x += -0.5 * vp * dt + sv * sq * z1
            v += -m.lambda_h * (vp - m.theta) * dt + m.eta * sv * sq * z2
        return x
    raise TypeError(f"unsupported model {m!r}")


def mc_prices(m: ModelSpec, kappas: Sequence[float], t: float, n_paths: int, seed: int,
              steps: int = HESTON_STEPS) -> list[PriceResult]:
    """Call prices at several strikes from one set of paths.

    The estimator averages the out-of-the-money payoff (lower variance) and
    converts to the call by parity.
    """
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    ks = np.asarray(kappas, dtype=float)
    s1 = np.zeros(ks.size)
    s2 = np.zeros(ks.size)
    done, block = 0, 0
    while done < n_paths:
        size = min(MC_BLOCK, n_paths - done)
        x = sample_log_returns(m, t, size, _block_rng(seed, block), steps)
        s = np.exp(x)
        for j, k in enumerate(ks):
            ek = math.exp(k)
            pay = np.maximum(s - ek, 0.0) if k >= 0.0 else np.maximum(ek - s, 0.0)
            s1[j] += pay.sum()
            s2[j] += np.dot(pay, pay)
        done += size
        block += 1
    out = []
    for j, k in enumerate(ks):
        mean = float(s1[j] / n_paths)
        var = max(s2[j] / n_paths - mean * mean, 0.0)
        se = math.sqrt(var / max(n_paths - 1, 1))
        call = mean if k >= 0.0 else mean - math.expm1(k)
        out.append(PriceResult(float(call), "monte-carlo", 4.0 * se, mc_std_error=se, seed=int(seed),
                               log_price=math.log(mean) if mean > 0.0 else -math.inf,
                               kappa=float(k)))
    return out


def mc_price(m: ModelSpec, kappa: float, t: float, n_paths: int, seed: int,
             steps: int = HESTON_STEPS) -> PriceResult:
    return mc_prices(m, [kappa], t, n_paths, seed, steps)[0]


def exact_price(m: ModelSpec, kappa: float, t: float) -> PriceResult:
    """Most accurate non-asymptotic price available for the model."""
    if isinstance(m, BlackScholes):
        v = m.sigma * math.sqrt(t)
        log_otm = bs_log_call(kappa, v) if kappa >= 0.0 else bs_log_put(kappa, v)
        return _from_otm(float(kappa), log_otm, "closed-sum", 1e-15 * math.exp(min(log_otm, 0.0)))
    if isinstance(m, Merton):
        M = 64
        while True:
            r = merton_series_price(m, kappa, t, M)
            otm = math.exp(r.log_price) if r.log_price > -745.0 else 0.0
            if r.abs_error_bound <= 1e-10 * otm + 1e-300 or M >= 4096:
                return r
            M *= 2
    return fourier_call(m, kappa, t)
