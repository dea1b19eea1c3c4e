"""Heston moment explosion: T*(p) approaching C/p, and the fixed-t wing slope."""
import argparse

from smileasym.asymptotics import heston_smile
from smileasym.blackscholes import implied_vol
from smileasym.models import Heston, heston_constant, heston_explosion_moment, heston_explosion_time
from smileasym.pricing import fourier_call


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=1.5)
    ap.add_argument("--theta", type=float, default=0.04)
    ap.add_argument("--eta", type=float, default=0.5)
    ap.add_argument("--sigma0", type=float, default=0.04)
    ap.add_argument("--rho", type=float, default=-0.5)
    ap.add_argument("--t", type=float, default=1.0)
    args = ap.parse_args()
    m = Heston(args.lam, args.theta, args.eta, args.sigma0, args.rho)
    c = heston_constant(m.rho, m.eta)
    print(f"C(rho, eta) = {c:.6f}")
    print(f"{'p':>10} {'T*':>12} {'p T* / C':>10}")
    for p in (10.0, 100.0, 1e3, 1e4, 1e5):
        ts = heston_explosion_time(m, p).t_star
        print(f"{p:10.0f} {ts:12.6g} {p * ts / c:10.6f}")
    t = args.t
    print(f"\np*({t}) = {heston_explosion_moment(m, t):.6f}")
    print(f"{'kappa':>8} {'exact':>10} {'fixed-t':>10} {'ratio':>8}")
    for k in (0.5, 1.0, 2.0, 4.0, 8.0):
        vol = implied_vol(k, t, log_otm=fourier_call(m, k, t).log_price).sigma
        q = heston_smile(m, k, t, "fixed-t").value
        print(f"{k:8.2f} {vol:10.5f} {q:10.5f} {q / vol:8.4f}")


if __name__ == "__main__":
    main()
