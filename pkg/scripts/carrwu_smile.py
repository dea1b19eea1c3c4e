"""Carr-Wu smile at one maturity: exact implied vol against both wing formulas."""
import argparse

from smileasym.asymptotics import carrwu_smile
from smileasym.blackscholes import implied_vol
from smileasym.errors import DomainError, RegimeError
from smileasym.models import CarrWu
from smileasym.pricing import exact_price


def _formula(m, k, t, side, branch):
    try:
        return f"{carrwu_smile(m, k, t, side, branch).value:10.5f}"
    except (DomainError, RegimeError):
        return f"{'-':>10}"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=0.2)
    ap.add_argument("--alpha", type=float, default=1.5)
    ap.add_argument("--t", type=float, default=0.25)
    ap.add_argument("--kappa", type=float, nargs="+", default=[-2.0, -1.0, -0.5, -0.2, 0.2, 0.5, 1.0, 2.0, 4.0])
    args = ap.parse_args()
    m, t = CarrWu(args.sigma, args.alpha), args.t
    print(f"{'kappa':>8} {'exact':>10} {'atypical':>10} {'typical':>10}")
    for k in args.kappa:
        vol = implied_vol(k, t, log_otm=exact_price(m, k, t).log_price).sigma
        side = "right" if k > 0 else "left"
        print(f"{k:8.3f} {vol:10.5f} {_formula(m, abs(k), t, side, 'atypical')} "
              f"{_formula(m, abs(k), t, side, 'typical')}")


if __name__ == "__main__":
    main()
