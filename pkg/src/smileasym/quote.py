"""The tagged result type returned by every asymptotic formula."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

FORMULAS = frozenset({
    "price-otm", "price-small-strike", "price-atm",
    "right-tail-general", "right-tail-special",
    "left-tail-general", "left-tail-special",
    "typical",
    "carrwu-right", "carrwu-left",
    "merton-low", "merton-mid", "merton-scaled", "merton-high",
    "heston-fixed-t", "heston-small-t", "heston-conjecture",
})


@dataclass(frozen=True)
class AsymptoticQuote:
    value: float
    formula: str
    regime: str
    inputs_echo: dict = field(default_factory=dict)
    conjectural: bool = False

    def __post_init__(self):
        if self.formula not in FORMULAS:
            raise ValueError(f"unknown formula id {self.formula!r}")
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise ValueError(f"quote value must be finite and >= 0, got {self.value}")
