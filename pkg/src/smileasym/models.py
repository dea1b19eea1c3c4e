"""Risk-neutral models for the log-return X_t = log S_t (S_0 = 1, zero rates).

Each model exposes its log moment generating function on a vertical strip of
the complex plane; characteristic functions, tails and prices all derive
from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.special import gammaln, log_ndtr, logsumexp

from . import contour
from .errors import AccuracyError, DomainError
from .heston import (Heston, HestonExplosion, heston_constant,  # noqa: F401
                     heston_explosion_moment, heston_explosion_time,
                     heston_log_mgf, heston_negative_explosion_moment,
                     heston_rate, heston_rate_dual, heston_rate_function)
from .stable import (left_tail_constant, right_tail_rate, stable_cdf,  # noqa: F401
                     stable_log_cdf, stable_log_sf)


@dataclass(frozen=True)
class BlackScholes:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError("sigma must be positive")


@dataclass(frozen=True)
class CarrWu:
    sigma: float
    alpha: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError("sigma must be positive")
        if not 1.0 < self.alpha <= 2.0:
            raise DomainError("alpha must lie in (1, 2]")

    @property
    def mu(self) -> float:
        return self.sigma ** self.alpha / math.cos(0.5 * math.pi * self.alpha)


@dataclass(frozen=True)
class Merton:
    sigma: float
    lam: float
    alpha_j: float
    delta: float
    mu_override: float | None = None

    def __post_init__(self):
        if not (self.sigma > 0.0 and self.lam > 0.0 and self.delta > 0.0):
            raise DomainError("sigma, lambda and delta must be positive")

    @property
    def mu(self) -> float:
        if self.mu_override is not None:
            return self.mu_override
        return -0.5 * self.sigma ** 2 - self.lam * math.expm1(self.alpha_j + 0.5 * self.delta ** 2)


ModelSpec = Union[BlackScholes, CarrWu, Merton, Heston]

RARE_JUMP_MERTON = Merton(sigma=0.2, lam=0.01, alpha_j=0.1, delta=0.3)


# ------------------------------------------------------------ log mgf, strip

def log_mgf_fn(m: ModelSpec, t: float) -> Callable[[complex], complex]:
    """z -> log E[exp(z X_t)], analytic on the strip returned by ``mgf_strip``."""
    if not t > 0.0:
        raise DomainError("t must be positive")
    if isinstance(m, BlackScholes):
        s2 = m.sigma ** 2 * t
        return lambda z: 0.5 * s2 * (z * z - z)
    if isinstance(m, CarrWu):
        c = math.cos(0.5 * math.pi * m.alpha)
        mu = m.mu
        return lambda z: t * (z * mu - (complex(z) * m.sigma) ** m.alpha / c)
    if isinstance(m, Merton):
        mu, s2, lam, aj, d2 = m.mu, m.sigma ** 2, m.lam, m.alpha_j, m.delta ** 2
        return lambda z: t * (z * mu + 0.5 * z * z * s2 + lam * (np.exp(z * aj + 0.5 * z * z * d2) - 1.0))
    if isinstance(m, Heston):
        return lambda z: heston_log_mgf(m, z, t)
    raise TypeError(f"unsupported model {m!r}")


def mgf_strip(m: ModelSpec, t: float) -> tuple[float, float]:
    """Open interval (lo, hi) of real z with E[exp(z X_t)] finite (lo is closed for Carr-Wu)."""
    if isinstance(m, (BlackScholes, Merton)):
        return -math.inf, math.inf
    if isinstance(m, CarrWu):
        return 0.0, math.inf
    if isinstance(m, Heston):
        return heston_negative_explosion_moment(m, t), heston_explosion_moment(m, t)
    raise TypeError(f"unsupported model {m!r}")


def contour_strip(m: ModelSpec, t: float) -> tuple[float, float]:
    """Strip used for shifted contours; Heston keeps clear of the explosion boundary."""
    lo, hi = mgf_strip(m, t)
    if isinstance(m, Heston):
        hi = 1.0 + 0.9 * (hi - 1.0) if math.isfinite(hi) else hi
        lo = 0.9 * lo if math.isfinite(lo) else lo
    return lo, hi


def model_cf(m: ModelSpec, u: float, t: float) -> complex:
    """E[exp(iuX_t)]."""
    return complex(np.exp(log_mgf_fn(m, t)(complex(0.0, float(u)))))


def model_mgf(m: ModelSpec, z: float, t: float) -> float:
    """E[exp(zX_t)] for real z, +inf outside the finite-moment strip."""
    z = float(z)
    lo, hi = mgf_strip(m, t)
    if isinstance(m, CarrWu):
        if z < 0.0:
            return math.inf
    elif not lo < z < hi:
        return math.inf
    val = log_mgf_fn(m, t)(complex(z, 0.0)).real
    return math.exp(val) if val < 709.0 else math.inf


# ------------------------------------------------------------------- tails

@dataclass(frozen=True)
class TailEstimate:
    value: float
    log_value: float
    side: str
    method: str
    abs_error_bound: float


def _tail(log_value: float, side: str, method: str, err: float) -> TailEstimate:
    value = math.exp(log_value) if log_value > -745.0 else 0.0
    return TailEstimate(value, log_value, side, method, err)


def merton_tail_terms(m: Merton, side: str, kappa: float, t: float, M: int) -> float:
    """log of the Poisson-Gaussian sum over n = 0..M."""
    lt = m.lam * t
    n = np.arange(M + 1, dtype=float)
    logw = -lt + n * math.log(lt) - gammaln(n + 1.0)
    mean = m.mu * t + n * m.alpha_j
    sd = np.sqrt(m.sigma ** 2 * t + n * m.delta ** 2)
    if side == "right":
        logp = log_ndtr((mean - kappa) / sd)
    else:
        logp = log_ndtr((-kappa - mean) / sd)
    return float(logsumexp(logw + logp))


def merton_remainder_log(lam_t: float, M: int) -> float:
    """log of the Chernoff bound (e lam t / M)^M on the omitted Poisson mass."""
    return M * (1.0 + math.log(lam_t) - math.log(M))


def _merton_tail(m: Merton, side: str, kappa: float, t: float, M: int | None,
                 rel_tol: float, max_terms: int) -> TailEstimate:
    lt = m.lam * t
    if M is not None:
        if M < 1:
            raise DomainError("M must be a positive integer")
        lv = merton_tail_terms(m, side, kappa, t, M)
        rem = math.exp(merton_remainder_log(lt, M)) if M > math.e * lt else 1.0
        return _tail(lv, side, "closed-sum", rem + 1e-15 * math.exp(lv))
    M = min(max(4, int(math.ceil(2.0 * math.e * lt))), max_terms)
    while True:
        lv = merton_tail_terms(m, side, kappa, t, M)
        lr = merton_remainder_log(lt, M)
        if lr <= math.log(rel_tol) + lv:
            return _tail(lv, side, "closed-sum", math.exp(lr) + 1e-15 * math.exp(lv))
        if M >= max_terms:
            raise AccuracyError("Merton tail sum did not reach the requested accuracy",
                                achieved=math.exp(min(lr, 0.0)))
        M = min(2 * M, max_terms)


def _contour_tail(m: ModelSpec, side: str, kappa: float, t: float) -> TailEstimate:
    logm = log_mgf_fn(m, t)
    lo, hi = contour_strip(m, t)
    if side == "right":
        r = contour.right_tail(logm, kappa, lo, hi)
        return _tail(r.log_value, side, "quadrature", r.abs_error)
    if lo < 0.0:
        r = contour.left_tail(logm, -kappa, lo, hi)
        return _tail(r.log_value, side, "quadrature", r.abs_error)
    sd = math.sqrt(max(contour.d2logm(logm, 0.5 * hi if math.isfinite(hi) else 0.5, lo, hi), 1e-300))
    f, err = contour.gil_pelaez_cdf(logm, -kappa, 1.0 / sd)
    if not f > 0.0:
        raise AccuracyError("left tail below quadrature resolution", achieved=err)
    return _tail(math.log(f), side, "quadrature", err)


def model_tail(m: ModelSpec, side: str, kappa: float, t: float, *, M: int | None = None,
               rel_tol: float = 1e-10, max_terms: int = 4096,
               left_switch: float | None = None) -> TailEstimate:
    """P(X_t > kappa) (side='right') or P(X_t <= -kappa) (side='left')."""
    kappa, t = float(kappa), float(t)
    if not kappa > 0.0 or not t > 0.0:
        raise DomainError("kappa and t must be positive")
    if side not in ("right", "left"):
        raise DomainError(f"side must be 'right' or 'left', got {side!r}")
    if isinstance(m, BlackScholes):
        s = m.sigma * math.sqrt(t)
        half = 0.5 * m.sigma ** 2 * t
        if side == "right":
            lv = float(log_ndtr(-(kappa + half) / s))
        else:
            lv = float(log_ndtr((-kappa + half) / s))
        return _tail(lv, side, "closed-sum", 1e-15 * math.exp(lv))
    if isinstance(m, Merton):
        return _merton_tail(m, side, kappa, t, M, rel_tol, max_terms)
    if isinstance(m, CarrWu):
        scale = m.sigma * t ** (1.0 / m.alpha)
        if side == "right":
            y = (kappa - m.mu * t) / scale
            lv, err, method = stable_log_sf(y, m.alpha)
        else:
            y = (-kappa - m.mu * t) / scale
            kw = {} if left_switch is None else {"left_switch": left_switch}
            lv, err, method = stable_log_cdf(y, m.alpha, **kw)
        return _tail(lv, side, method, err)
    if isinstance(m, Heston):
        return _contour_tail(m, side, kappa, t)
    raise TypeError(f"unsupported model {m!r}")


# ---------------------------------------------------------- small-time data

@dataclass(frozen=True)
class Gaussian:
    sigma: float


@dataclass(frozen=True)
class SkewedStable:
    alpha: float
    scale: float


@dataclass(frozen=True)
class ScalingData:
    gamma_t: Callable[[float], float]
    limit_law: Union[Gaussian, SkewedStable]
    rv_index_right: Callable[..., float]
    rv_index_left: Callable[..., float]
    notes: dict = field(default_factory=dict)


def merton_f(a: float, delta: float) -> float:
    """min over n >= 1 of n + a^2 / (2 n delta^2)."""
    a, delta = float(a), float(delta)
    if a < 0.0 or not delta > 0.0:
        raise DomainError("need a >= 0 and delta > 0")
    q = a * a / (2.0 * delta * delta)
    # f = n + q/n on [sqrt(2(n-1)n) delta, sqrt(2n(n+1)) delta), i.e. n(n-1) <= q < n(n+1)
    n = max(1, int(math.floor(0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * q)))) + 1)
    while n > 1 and (n - 1) * n > q:
        n -= 1
    while n * (n + 1) <= q:
        n += 1
    return n + q / n


def scaling_data(m: ModelSpec) -> ScalingData:
    """Small-time scaling gamma_t, limit law of X_t / gamma_t and the tail indices."""
    if isinstance(m, BlackScholes):
        return ScalingData(math.sqrt, Gaussian(m.sigma), lambda r: r * r, lambda r: r * r)
    if isinstance(m, CarrWu):
        a = m.alpha
        return ScalingData(lambda t: t ** (1.0 / a), SkewedStable(a, m.sigma),
                           lambda r: r ** (a / (a - 1.0)), lambda r: 1.0)
    if isinstance(m, Merton):
        def right(r: float, a: float = 1.0) -> float:
            return merton_f(r * a, m.delta) / merton_f(a, m.delta)
        return ScalingData(math.sqrt, Gaussian(m.sigma), right, right,
                           notes={"index": "depends on a = kappa / sqrt(log(1/t))"})
    if isinstance(m, Heston):
        def index(r: float, kappa: float = 1.0) -> float:
            return heston_rate_dual(m, r * kappa) / heston_rate_dual(m, kappa)
        return ScalingData(math.sqrt, Gaussian(math.sqrt(m.sigma0)), index, index,
                           notes={"index": "depends on the strike kappa"})
    raise TypeError(f"unsupported model {m!r}")
