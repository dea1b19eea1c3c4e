"""Plain-text INI configs for models and experiments.

A model config has a ``[model]`` section with ``name`` (bs, carrwu, merton,
heston) and the model's parameters as decimal literals.  An experiment config
adds ``[path]`` and ``[experiment]`` sections; see configs/ for examples.
"""
from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError
from .heston import Heston
from .models import BlackScholes, CarrWu, Merton, ModelSpec

_MODEL_KEYS = {
    "bs": (BlackScholes, ("sigma",), ()),
    "carrwu": (CarrWu, ("sigma", "alpha"), ()),
    "merton": (Merton, ("sigma", "lam", "alpha_j", "delta"), ("mu",)),
    "heston": (Heston, ("lambda_h", "theta", "eta", "sigma0", "rho"), ()),
}


@dataclass(frozen=True)
class PathSpec:
    kind: str
    regime: str
    points: tuple[tuple[float, float], ...]
    scaling_exponent: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    path: PathSpec
    formula: str
    seed: int = 0
    method: str = "auto"
    n_paths: int = 100_000
    branch_ratio: float = 10.0
    max_last_gap: float | None = None
    digest: str = ""
    extra: dict = field(default_factory=dict)


def _read(text_or_path) -> tuple[configparser.ConfigParser, str]:
    src = str(text_or_path)
    text = Path(src).read_text() if "\n" not in src and Path(src).is_file() else src
    cp = configparser.ConfigParser()
    cp.read_string(text)
    return cp, text


def model_from_section(sec) -> ModelSpec:
    name = sec.get("name", "").strip().lower()
    if name not in _MODEL_KEYS:
        raise DomainError(f"unknown model name {name!r}; expected one of {sorted(_MODEL_KEYS)}")
    cls, required, optional = _MODEL_KEYS[name]
    missing = [k for k in required if k not in sec]
    if missing:
        raise DomainError(f"model {name} is missing parameters {missing}")
    kw = {k: float(sec[k]) for k in required}
    if name == "merton" and "mu" in sec:
        kw["mu_override"] = float(sec["mu"])
    unknown = set(sec) - set(required) - set(optional) - {"name"}
    if unknown:
        raise DomainError(f"unknown keys for model {name}: {sorted(unknown)}")
    return cls(**kw)


def load_model(text_or_path) -> ModelSpec:
    cp, _ = _read(text_or_path)
    if "model" not in cp:
        raise DomainError("config has no [model] section")
    return model_from_section(cp["model"])


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.replace(",", " ").split()]


def _grid(sec, prefix: str) -> list[float]:
    if f"{prefix}_values" in sec:
        return _floats(sec[f"{prefix}_values"])
    start, stop = float(sec[f"{prefix}_start"]), float(sec[f"{prefix}_stop"])
    n = int(sec.get(f"{prefix}_num", "5"))
    return [float(x) for x in np.geomspace(start, stop, n)]


def path_from_section(sec, model: ModelSpec) -> PathSpec:
    kind = sec.get("kind", "").strip()
    regime = sec.get("regime", "").strip()
    sign = -1.0 if regime == "left-atypical" else 1.0
    expo = None
    if kind == "fixed-t-kappa-grid":
        t = float(sec["t"])
        pts = [(sign * abs(k), t) for k in _grid(sec, "kappa")]
    elif kind == "fixed-kappa-t-grid":
        k = float(sec["kappa"])
        pts = [(sign * abs(k), t) for t in _grid(sec, "t")]
    elif kind == "curve":
        # kappa = a * scale(t); scale is t^exponent or kbar2(t) = sqrt(log(1/t))
        a = float(sec.get("a", "1"))
        scale = sec.get("scale", "power").strip()
        ts = _grid(sec, "t")
        if scale == "kbar2":
            pts = [(sign * a * math.sqrt(math.log(1.0 / t)), t) for t in ts]
        elif scale == "power":
            expo = float(sec["exponent"]) if "exponent" in sec else \
                1.0 / getattr(model, "alpha", 2.0)
            pts = [(sign * a * t ** expo, t) for t in ts]
        else:
            raise DomainError(f"unknown curve scale {scale!r}")
    else:
        raise DomainError(f"unknown path kind {kind!r}")
    return PathSpec(kind, regime, tuple(pts), expo)


def load_experiment(text_or_path) -> ExperimentConfig:
    cp, text = _read(text_or_path)
    for s in ("model", "path", "experiment"):
        if s not in cp:
            raise DomainError(f"experiment config has no [{s}] section")
    model = model_from_section(cp["model"])
    path = path_from_section(cp["path"], model)
    ex = cp["experiment"]
    known = {"formula", "seed", "method", "n_paths", "branch_ratio", "max_last_gap"}
    return ExperimentConfig(
        model=model,
        path=path,
        formula=ex["formula"].strip(),
        seed=ex.getint("seed", 0),
        method=ex.get("method", "auto").strip(),
        n_paths=ex.getint("n_paths", 100_000),
        branch_ratio=ex.getfloat("branch_ratio", 10.0),
        max_last_gap=ex.getfloat("max_last_gap") if "max_last_gap" in ex else None,
        digest=hashlib.sha256(text.encode()).hexdigest()[:16],
        extra={k: v for k, v in ex.items() if k not in known},
    )
