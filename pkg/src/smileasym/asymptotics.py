"""Asymptotic implied-volatility formulas, generic and model specific.

Every evaluator returns an ``AsymptoticQuote`` tagged with a formula id and
the regime in which the formula is a valid first-order equivalent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .blackscholes import _gap
from .errors import DomainError, RegimeError
from .heston import (Heston, heston_constant, heston_explosion_moment,
                     heston_rate_dual)
from .models import (BlackScholes, CarrWu, Gaussian, Merton, ModelSpec,
                     SkewedStable, merton_f, scaling_data)
from .quote import AsymptoticQuote
from .specfun import LOG_SQRT_2PI, SQRT_2PI, d_inv, mills_complement
from .stable import stable_call

# kappa / scale at or above this counts as "much larger" when picking a branch
BRANCH_RATIO = 10.0

__all__ = [
    "BRANCH_RATIO", "TypicalCoeff", "tail_to_vol_right", "tail_to_vol_left",
    "typical_coeff", "typical_vol", "carrwu_b", "carrwu_smile", "merton_f",
    "kbar1", "kbar2", "merton_tail_logasym", "merton_smile", "heston_smile",
]


def _check_kt(kappa: float, t: float) -> tuple[float, float]:
    kappa, t = float(kappa), float(t)
    if not (kappa > 0.0 and t > 0.0):
        raise DomainError("kappa and t must be positive")
    return kappa, t


def _check_log_tail(log_tail: float) -> float:
    log_tail = float(log_tail)
    if not log_tail < 0.0:
        raise DomainError(f"log tail must be negative, got {log_tail}")
    return log_tail


# ------------------------------------------------------- tail -> implied vol

def tail_to_vol_right(kappa: float, t: float, log_tail: float, special: bool = False) -> AsymptoticQuote:
    """Right-wing implied vol from L = -log P(X_t > kappa)."""
    kappa, t = _check_kt(kappa, t)
    L = -_check_log_tail(log_tail)
    echo = {"kappa": kappa, "t": t, "log_tail": -L}
    if special:
        return AsymptoticQuote(kappa / math.sqrt(2.0 * t * L), "right-tail-special",
                               "-log tail / kappa -> inf", echo)
    r = L / kappa
    if r < 1.0:
        raise RegimeError(f"-log tail / kappa = {r:.6g} < 1: general right-wing form undefined")
    return AsymptoticQuote(_gap(r - 1.0) * math.sqrt(2.0 * kappa / t), "right-tail-general",
                           "right tail vanishes, -log tail / kappa >= 1", echo)


def tail_to_vol_left(kappa: float, t: float, log_tail: float, special: bool = False) -> AsymptoticQuote:
    """Left-wing implied vol at -kappa from L = -log P(X_t <= -kappa)."""
    kappa, t = _check_kt(kappa, t)
    L = -_check_log_tail(log_tail)
    echo = {"kappa": kappa, "t": t, "log_tail": -L}
    if special:
        return AsymptoticQuote(kappa / math.sqrt(2.0 * t * L), "left-tail-special",
                               "-log tail / kappa -> inf", echo)
    return AsymptoticQuote(_gap(L / kappa) * math.sqrt(2.0 * kappa / t), "left-tail-general",
                           "left tail vanishes", echo)


# ---------------------------------------------------------- typical regime

@dataclass(frozen=True)
class TypicalCoeff:
    a: float
    c_plus: float
    c_minus: float
    limit_law: object


def _log_excess(law, a: float, side: str) -> float:
    """log E[(Y - a)^+] (right) or log E[(Y + a)^-] (left) for the limit law."""
    if isinstance(law, Gaussian):
        # symmetric law: both sides equal s * E[(Z - a/s)^+] = s phi(z) (1 - z U(z))
        z = a / law.sigma
        return math.log(law.sigma) - 0.5 * z * z - LOG_SQRT_2PI + math.log(mills_complement(z))
    if isinstance(law, SkewedStable):
        if side == "right":
            val, _ = stable_call(a, law.alpha, law.scale)
        else:
            # E[(Y + a)^-] = E[(Y + a)^+] - a since E[Y] = 0
            val, _ = stable_call(-a, law.alpha, law.scale)
            val -= a
        if not val > 0.0:
            raise DomainError(f"expected excess is not positive ({val:g})")
        return math.log(val)
    raise DomainError(f"unsupported limit law {law!r}")


def typical_coeff(law, a: float) -> TypicalCoeff:
    """C_+(a) and C_-(a) of the limit law."""
    a = float(a)
    if a < 0.0:
        raise DomainError("a must be >= 0")
    if isinstance(law, Gaussian) and not law.sigma > 0.0:
        raise DomainError("degenerate Gaussian limit law")
    cs = []
    for side in ("right", "left"):
        if a == 0.0:
            cs.append(SQRT_2PI * math.exp(_log_excess(law, 0.0, side)))
        else:
            z = d_inv(log_y=_log_excess(law, a, side) - math.log(a))
            cs.append(a / z)
    return TypicalCoeff(a, cs[0], cs[1], law)


def typical_vol(m: ModelSpec, a: float, t: float, side: str = "right") -> AsymptoticQuote:
    """sigma_imp(+-kappa, t) ~ C_+-(a) gamma_t / sqrt(t) along kappa = a gamma_t."""
    t = float(t)
    if not t > 0.0:
        raise DomainError("t must be positive")
    if side not in ("right", "left"):
        raise DomainError(f"side must be 'right' or 'left', got {side!r}")
    sd = scaling_data(m)
    c = typical_coeff(sd.limit_law, a)
    coeff = c.c_plus if side == "right" else c.c_minus
    echo = {"a": float(a), "t": t, "side": side, "coeff": coeff}
    return AsymptoticQuote(coeff * sd.gamma_t(t) / math.sqrt(t), "typical",
                           "t -> 0 with kappa / gamma_t -> a", echo)


# ----------------------------------------------------------------- Carr-Wu

def carrwu_b(m: CarrWu) -> float:
    """Prefactor of the right-wing power law; sqrt(2) sigma at alpha = 2."""
    a = m.alpha
    if a == 2.0:
        return math.sqrt(2.0) * m.sigma
    c = abs(math.cos(0.5 * math.pi * a))
    return (a * m.sigma) ** (0.5 * a / (a - 1.0)) / (math.sqrt(2.0 * (a - 1.0)) * c ** (0.5 / (a - 1.0)))


def carrwu_smile(m: CarrWu, kappa: float, t: float, side: str = "right",
                 branch: str = "auto", ratio: float = BRANCH_RATIO) -> AsymptoticQuote:
    """Carr-Wu wing formulas; ``branch`` is 'atypical', 'typical' or 'auto'."""
    kappa, t = _check_kt(kappa, t)
    if side not in ("right", "left"):
        raise DomainError(f"side must be 'right' or 'left', got {side!r}")
    a = kappa / t ** (1.0 / m.alpha)
    if branch == "auto":
        branch = "atypical" if a >= ratio else "typical"
    if branch == "typical":
        return typical_vol(m, a, t, side)
    if branch != "atypical":
        raise RegimeError(f"unknown branch {branch!r}")
    echo = {"kappa": kappa, "t": t, "scaled_strike": a, "branch_ratio": ratio}
    if m.alpha == 2.0:
        # exact Black-Scholes with volatility sqrt(2) sigma
        return AsymptoticQuote(math.sqrt(2.0) * m.sigma, f"carrwu-{side}",
                               "alpha = 2: Black-Scholes", echo)
    if side == "right":
        expo = -(2.0 - m.alpha) / (2.0 * (m.alpha - 1.0))
        return AsymptoticQuote(carrwu_b(m) * (kappa / t) ** expo, "carrwu-right",
                               "kappa / t^(1/alpha) -> inf", echo)
    L = m.alpha * math.log(kappa) - math.log(t)
    if not L > 0.0:
        raise RegimeError("left Carr-Wu formula needs kappa^alpha > t")
    return AsymptoticQuote(_gap(L / kappa) * math.sqrt(2.0 * kappa / t), "carrwu-left",
                           "kappa / t^(1/alpha) -> inf", echo)


# ------------------------------------------------------------------ Merton

def kbar1(t: float) -> float:
    """sqrt(t log(1/t)), the diffusive scale of the Merton smile."""
    if not 0.0 < t < 1.0:
        raise DomainError("need 0 < t < 1")
    return math.sqrt(t * math.log(1.0 / t))


def kbar2(t: float) -> float:
    """sqrt(log(1/t)), the scale at which jumps dominate."""
    if not 0.0 < t < 1.0:
        raise DomainError("need 0 < t < 1")
    return math.sqrt(math.log(1.0 / t))


def merton_tail_logasym(m: Merton, kappa: float, t: float, regime: str = "auto",
                        ratio: float = BRANCH_RATIO) -> float:
    """Leading-order log P(X_t > kappa): 'scaled' (kappa ~ a kbar2) or 'high' (kappa >> kbar2)."""
    kappa, t = _check_kt(kappa, t)
    if t >= 1.0:
        raise DomainError("log(1/t) must be positive")
    a = kappa / kbar2(t)
    if regime == "auto":
        regime = "high" if a >= ratio else "scaled"
    if regime == "scaled":
        return -merton_f(a, m.delta) * math.log(1.0 / t)
    if regime == "high":
        return -(kappa / m.delta) * math.sqrt(2.0 * math.log(kappa / t))
    raise RegimeError(f"unknown regime {regime!r}")


def merton_smile(m: Merton, kappa: float, t: float, ratio: float = BRANCH_RATIO,
                 branch: str = "auto") -> AsymptoticQuote:
    """Merton smile; ``branch`` forces 'max' (bounded kappa / kbar2) or 'high'."""
    kappa, t = float(kappa), float(t)
    if kappa < 0.0 or not t > 0.0:
        raise DomainError("need kappa >= 0 and t > 0")
    if branch == "auto":
        branch = "high" if t >= 1.0 or kappa >= ratio * kbar2(t) else "max"
    echo = {"kappa": kappa, "t": t, "branch_ratio": ratio}
    if branch == "high":
        if not kappa > t:
            raise RegimeError("high-strike formula needs kappa > t")
        val = math.sqrt(m.delta * kappa / (2.0 * t * math.sqrt(2.0 * math.log(kappa / t))))
        return AsymptoticQuote(val, "merton-high", "kappa >> kbar2(t) or kappa -> inf", echo)
    if branch != "max":
        raise RegimeError(f"unknown branch {branch!r}")
    if t >= 1.0:
        raise DomainError("bounded-strike formula needs t < 1")
    a = kappa / kbar2(t)
    echo["scaled_strike"] = a
    jump = 0.0
    if kappa > t:
        jump = kappa / math.sqrt(2.0 * t * merton_f(a, m.delta) * math.log(kappa / t))
    if jump <= m.sigma:
        return AsymptoticQuote(m.sigma, "merton-low", "kappa <= sigma kbar1(t)", echo)
    formula = "merton-mid" if a * ratio <= 1.0 else "merton-scaled"
    return AsymptoticQuote(jump, formula, "t -> 0, kappa = O(kbar2(t))", echo)


# ------------------------------------------------------------------ Heston

def heston_smile(m: Heston, kappa: float, t: float, branch: str, *,
                 p_star: float | None = None, rate: float | None = None) -> AsymptoticQuote:
    """Heston wing formulas.

    'fixed-t' uses the explosion moment p*(t), 'small-t' the dual rate
    function, 'conjecture' the joint-limit interpolation sqrt(kappa / (2 C)).
    ``p_star`` and ``rate`` replace the exact ingredients, e.g. by their
    asymptotic equivalents.
    """
    kappa, t = _check_kt(kappa, t)
    echo = {"kappa": kappa, "t": t}
    if branch == "fixed-t":
        p = heston_explosion_moment(m, t) if p_star is None else float(p_star)
        echo["p_star"] = p
        val = 0.0 if math.isinf(p) else _gap(p - 1.0) * math.sqrt(2.0 * kappa / t)
        return AsymptoticQuote(val, "heston-fixed-t", "t fixed, kappa -> inf", echo)
    if branch == "small-t":
        lam = heston_rate_dual(m, kappa) if rate is None else float(rate)
        echo["rate"] = lam
        val = 0.0 if math.isinf(lam) else kappa / math.sqrt(2.0 * lam)
        return AsymptoticQuote(val, "heston-small-t", "kappa fixed, t -> 0", echo)
    if branch == "conjecture":
        c = heston_constant(m.rho, m.eta)
        echo["c_const"] = c
        val = 0.0 if math.isinf(c) else math.sqrt(kappa / (2.0 * c))
        return AsymptoticQuote(val, "heston-conjecture", "kappa -> inf and t -> 0 jointly",
                               echo, conjectural=True)
    raise RegimeError(f"unknown branch {branch!r}")
