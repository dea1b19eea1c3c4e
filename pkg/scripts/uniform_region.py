"""Smallest strike multiplier M beyond which the Carr-Wu wing formula is uniformly accurate."""
import argparse

from smileasym.experiment import smallest_uniform_multiplier
from smileasym.models import CarrWu


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=0.2)
    ap.add_argument("--alpha", type=float, default=1.5)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.05, 0.02])
    ap.add_argument("--side", choices=["right", "left"], default="right")
    args = ap.parse_args()
    m = CarrWu(args.sigma, args.alpha)
    ts = [1e-1, 1e-2, 1e-3, 1e-4]
    mults = [2.0 ** j for j in range(-1, 9)]
    for eps in args.eps:
        mm = smallest_uniform_multiplier(m, ts, mults, eps, args.side)
        print(f"eps={eps:g}: M={'none in grid' if mm is None else f'{mm:g}'}")


if __name__ == "__main__":
    main()
