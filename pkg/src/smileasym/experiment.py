"""Exact-versus-asymptotic comparisons along (kappa, t) path families."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import asymptotics as asy
from .blackscholes import bs_log_otm, implied_vol, price_to_vol_asymptotic
from .config import ExperimentConfig, PathSpec
from .errors import DegenerateError, DomainError, RegimeError
from .heston import Heston
from .models import CarrWu, Merton, ModelSpec, model_tail, scaling_data
from .pricing import PriceResult, exact_price, mc_prices

KINDS = ("fixed-t-kappa-grid", "fixed-kappa-t-grid", "curve")
REGIMES = ("right-atypical", "left-atypical", "typical", "atm")
COLUMNS = ("kappa", "t", "exact_price", "exact_vol", "asym_vol", "ratio", "formula",
           "log_price", "flag")
# rows whose price error bound exceeds this share of the price are flagged
CAP_FRACTION = 0.1

# formula -> (allowed regimes, required model type or None)
_FORMULA_RULES = {
    "price-otm": (("right-atypical", "left-atypical"), None),
    "price-small-strike": (("typical", "right-atypical", "left-atypical"), None),
    "price-atm": (("atm",), None),
    "right-tail-general": (("right-atypical",), None),
    "right-tail-special": (("right-atypical",), None),
    "left-tail-general": (("left-atypical",), None),
    "left-tail-special": (("left-atypical",), None),
    "typical": (("typical",), None),
    "carrwu-right": (("right-atypical",), CarrWu),
    "carrwu-left": (("left-atypical",), CarrWu),
    "merton": (("right-atypical", "typical"), Merton),
    "merton-high": (("right-atypical",), Merton),
    "heston-fixed-t": (("right-atypical",), Heston),
    "heston-small-t": (("right-atypical",), Heston),
    "heston-conjecture": (("right-atypical",), Heston),
}
FORMULA_CHOICES = tuple(sorted(_FORMULA_RULES))


@dataclass(frozen=True)
class PathFamily:
    kind: str
    points: tuple[tuple[float, float], ...]
    regime_tag: str
    scaling_exponent: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown path kind {self.kind!r}")
        if self.regime_tag not in REGIMES:
            raise DomainError(f"unknown regime tag {self.regime_tag!r}")
        if any(not t > 0.0 for _, t in self.points):
            raise DomainError("maturities must be positive")
        ks = [abs(k) for k, _ in self.points]
        ts = [t for _, t in self.points]
        if self.kind == "fixed-t-kappa-grid" and any(b <= a for a, b in zip(ks, ks[1:])):
            raise DomainError("kappa grid must increase in |kappa|")
        if self.kind != "fixed-t-kappa-grid" and any(b >= a for a, b in zip(ts, ts[1:])):
            raise DomainError("t grid must decrease")

    @classmethod
    def from_spec(cls, spec: PathSpec) -> "PathFamily":
        return cls(spec.kind, spec.points, spec.regime, spec.scaling_exponent)

    def limit_variable(self) -> np.ndarray:
        if self.kind == "fixed-t-kappa-grid":
            return np.array([1.0 / abs(k) for k, _ in self.points])
        return np.array([t for _, t in self.points])


@dataclass(frozen=True)
class Row:
    kappa: float
    t: float
    exact_price: float
    exact_vol: float
    asym_vol: float
    ratio: float
    formula: str
    log_price: float
    flag: str = "ok"


@dataclass
class ExperimentReport:
    rows: list[Row]
    limit_variable: list[float] = field(default_factory=list)
    convergence: tuple[float, float] | None = None
    metadata: dict = field(default_factory=dict)


def check_regime(m: ModelSpec, path: PathFamily, formula: str) -> None:
    """Raise RegimeError if the formula does not apply to this model and path."""
    if formula not in _FORMULA_RULES:
        raise RegimeError(f"unknown formula {formula!r}")
    regimes, mtype = _FORMULA_RULES[formula]
    if path.regime_tag not in regimes:
        raise RegimeError(f"formula {formula} does not cover regime {path.regime_tag}")
    if mtype is not None and not isinstance(m, mtype):
        raise RegimeError(f"formula {formula} needs a {mtype.__name__} model")
    tag = path.regime_tag
    for k, t in path.points:
        if (tag == "right-atypical" and not k > 0.0) or (tag == "left-atypical" and not k < 0.0) \
                or (tag == "atm" and k != 0.0):
            raise RegimeError(f"strike {k} inconsistent with regime {tag}")
    if isinstance(m, CarrWu) and tag in ("right-atypical", "left-atypical", "typical"):
        # atypical needs kappa >> t^(1/alpha); typical needs small t with bounded kappa / t^(1/alpha)
        scaled = [abs(k) / t ** (1.0 / m.alpha) for k, t in path.points]
        if tag == "typical" and path.kind == "fixed-t-kappa-grid":
            raise RegimeError("typical regime needs t -> 0")
        if tag != "typical" and scaled[-1] <= 1.0:
            raise RegimeError("atypical path ends with kappa below t^(1/alpha)")


def _asymptotic(m: ModelSpec, formula: str, kappa: float, t: float, log_price: float,
                ratio: float, seed: int):
    k = abs(kappa)
    if formula == "price-otm":
        return price_to_vol_asymptotic(kappa, t, log_price=log_price, branch="otm")
    if formula == "price-small-strike":
        return price_to_vol_asymptotic(kappa, t, log_price=log_price, branch="small-strike")
    if formula == "price-atm":
        return price_to_vol_asymptotic(0.0, t, log_price=log_price, branch="atm")
    if formula.startswith("right-tail") or formula.startswith("left-tail"):
        side = "right" if formula.startswith("right") else "left"
        lt = model_tail(m, side, k, t).log_value
        fn = asy.tail_to_vol_right if side == "right" else asy.tail_to_vol_left
        return fn(k, t, lt, special=formula.endswith("special"))
    if formula == "typical":
        a = k / scaling_data(m).gamma_t(t)
        return asy.typical_vol(m, a, t, "right" if kappa >= 0.0 else "left")
    if formula.startswith("carrwu"):
        return asy.carrwu_smile(m, k, t, formula.split("-")[1], "atypical", ratio)
    if formula == "merton":
        return asy.merton_smile(m, k, t, ratio)
    if formula == "merton-high":
        return asy.merton_smile(m, k, t, ratio, branch="high")
    if formula.startswith("heston"):
        return asy.heston_smile(m, k, t, formula[len("heston-"):])
    raise RegimeError(f"unknown formula {formula!r}")


def _prices(m: ModelSpec, path: PathFamily, method: str, n_paths: int, seed: int) -> list[PriceResult]:
    if method == "mc":
        out = []
        # one path set per maturity keeps multi-strike rows on common paths
        for t in dict.fromkeys(t for _, t in path.points):
            ks = [k for k, tt in path.points if tt == t]
            out.extend(mc_prices(m, ks, t, n_paths, seed))
        return out
    if method != "auto":
        raise DomainError(f"unknown pricing method {method!r}")
    return [exact_price(m, k, t) for k, t in path.points]


def run_experiment(m: ModelSpec, path: PathFamily, formula: str, *, seed: int = 0,
                   method: str = "auto", n_paths: int = 100_000,
                   branch_ratio: float = asy.BRANCH_RATIO, metadata: dict | None = None) -> ExperimentReport:
    check_regime(m, path, formula)
    rows = []
    for (k, t), pr in zip(path.points, _prices(m, path, method, n_paths, seed)):
        lp = pr.log_price
        flag = "ok"
        if not (lp is not None and math.isfinite(lp)):
            rows.append(Row(k, t, pr.price, math.nan, math.nan, math.nan, formula, -math.inf, "no-price"))
            continue
        if pr.abs_error_bound > 0.0 and math.log(pr.abs_error_bound) > math.log(CAP_FRACTION) + lp:
            flag = "capped"
        vol = implied_vol(k, t, log_otm=lp).sigma
        q = _asymptotic(m, formula, k, t, lp, branch_ratio, seed)
        ratio = vol / q.value if q.value > 0.0 else math.inf
        rows.append(Row(k, t, pr.price, vol, q.value, ratio, q.formula, lp, flag))
    meta = {"model": repr(m), "seed": seed, "method": method, "formula": formula}
    meta.update(metadata or {})
    rep = ExperimentReport(rows, list(path.limit_variable()), None, meta)
    try:
        rep.convergence = convergence_metric(rep)
    except (DegenerateError, DomainError):
        rep.convergence = None
    return rep


def run_config(cfg: ExperimentConfig) -> ExperimentReport:
    return run_experiment(cfg.model, PathFamily.from_spec(cfg.path), cfg.formula, seed=cfg.seed,
                          method=cfg.method, n_paths=cfg.n_paths, branch_ratio=cfg.branch_ratio,
                          metadata={"config_hash": cfg.digest})


def closed_loop_residual(row: Row) -> float:
    """|log BS price at the reported vol - log price|, i.e. the inverter residual."""
    return abs(bs_log_otm(row.kappa, row.exact_vol * math.sqrt(row.t)) - row.log_price)


def fit_log_gap(x: Sequence[float], ratios: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of log|ratio - 1| on log x, and the last |ratio - 1|."""
    x = np.asarray(x, dtype=float)
    r = np.asarray(ratios, dtype=float)
    if x.size < 3:
        raise DomainError("need at least three rows")
    keep = np.isfinite(r) & (r != 1.0) & (x > 0.0)
    if keep.sum() < 2:
        raise DegenerateError("fewer than two rows with ratio != 1")
    slope = np.polyfit(np.log(x[keep]), np.log(np.abs(r[keep] - 1.0)), 1)[0]
    return float(slope), float(abs(r[keep][-1] - 1.0))


def convergence_metric(report: ExperimentReport) -> tuple[float, float]:
    """(slope, last_gap) over unflagged rows; flagged rows never enter the fit."""
    pairs = [(x, row.ratio) for x, row in zip(report.limit_variable, report.rows)]
    if len(pairs) < 3:
        raise DomainError("need at least three rows")
    use = [(x, r) for (x, r), row in zip(pairs, report.rows) if row.flag == "ok"]
    if not use:
        raise DegenerateError("every row is flagged")
    xs, rs = zip(*use)
    if len(xs) < 3:
        raise DegenerateError("fewer than three usable rows")
    return fit_log_gap(xs, rs)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return format(float(v), ".12g")


def emit(report: ExperimentReport, fmt: str = "csv") -> bytes:
    """Header then one row per point, 12 significant digits, fixed column order."""
    if fmt not in ("csv", "tsv"):
        raise DomainError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="," if fmt == "csv" else "\t", lineterminator="\n")
    w.writerow(COLUMNS)
    for row in report.rows:
        w.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue().encode()


def smallest_uniform_multiplier(m: CarrWu, ts: Sequence[float], multipliers: Sequence[float],
                                eps: float, side: str = "right") -> float | None:
    """Smallest M in ``multipliers`` with |exact/asymptotic - 1| <= eps on the whole
    grid {(kappa, t): t in ts, kappa = M' t^(1/alpha), M' >= M}."""
    ms = sorted(float(x) for x in multipliers)
    ok = []
    for mm in ms:
        good = True
        for t in ts:
            kappa = mm * t ** (1.0 / m.alpha)
            signed = kappa if side == "right" else -kappa
            pr = exact_price(m, signed, t)
            vol = implied_vol(signed, t, log_otm=pr.log_price).sigma
            q = asy.carrwu_smile(m, kappa, t, side, "atypical")
            if abs(vol / q.value - 1.0) > eps:
                good = False
                break
        ok.append(good)
    for i, mm in enumerate(ms):
        if all(ok[i:]):
            return mm
    return None
