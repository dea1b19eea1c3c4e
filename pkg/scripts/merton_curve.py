"""Merton implied vol along kappa = sqrt(log(1/t)) against the asymptotic formula."""
import argparse

from smileasym.asymptotics import kbar2, merton_smile
from smileasym.blackscholes import implied_vol
from smileasym.models import Merton
from smileasym.pricing import merton_series_price


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=0.2)
    ap.add_argument("--lam", type=float, default=0.01)
    ap.add_argument("--alpha-j", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.3)
    ap.add_argument("--t", type=float, nargs="+", default=[0.3, 0.2, 0.1, 0.05, 0.02, 0.01])
    args = ap.parse_args()
    m = Merton(args.sigma, args.lam, args.alpha_j, args.delta)
    print(f"{'t':>8} {'kappa':>8} {'exact':>10} {'asymptotic':>10} {'ratio':>8}")
    for t in args.t:
        k = kbar2(t)
        vol = implied_vol(k, t, log_otm=merton_series_price(m, k, t).log_price).sigma
        q = merton_smile(m, k, t)
        print(f"{t:8.3g} {k:8.4f} {vol:10.5f} {q.value:10.5f} {q.value / vol:8.4f}")


if __name__ == "__main__":
    main()
