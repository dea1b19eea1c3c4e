"""Command line entry point: ``smileasym {price,impvol,tail,smile,verify}``."""
from __future__ import annotations

import argparse
import sys

from . import asymptotics as asy
from .blackscholes import implied_vol
from .config import load_experiment, load_model
from .errors import AccuracyError, DegenerateError, DomainError, RegimeError
from .experiment import emit, run_config
from .heston import Heston
from .models import CarrWu, Merton, model_tail
from .pricing import (exact_price, fourier_call, mc_price, merton_series_price,
                      put_from_call)

EXIT_REGIME = 2
EXIT_ACCURACY = 3


def _price(m, kappa, t, method, paths, seed):
    if method == "fourier":
        return fourier_call(m, kappa, t)
    if method == "series":
        if not isinstance(m, Merton):
            raise DomainError("series pricing is only available for Merton")
        return merton_series_price(m, kappa, t)
    if method == "mc":
        return mc_price(m, kappa, t, paths, seed)
    return exact_price(m, kappa, t)


def _add_point(p, side=False):
    p.add_argument("model_config")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    if side:
        p.add_argument("--side", choices=("right", "left"), default="right")


def _add_method(p):
    p.add_argument("--method", choices=("auto", "fourier", "series", "mc"), default="auto")
    p.add_argument("--paths", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smileasym", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("price", help="call and put price of a model")
    _add_point(p)
    _add_method(p)

    p = sub.add_parser("impvol", help="implied volatility of a model price or a given call price")
    _add_point(p)
    _add_method(p)
    p.add_argument("--call", type=float, help="invert this call price instead of pricing the model")

    p = sub.add_parser("tail", help="tail probability of the log-return")
    _add_point(p, side=True)

    p = sub.add_parser("smile", help="asymptotic implied volatility")
    _add_point(p, side=True)
    p.add_argument("--formula", required=True,
                   choices=("carrwu", "merton", "heston-fixed-t", "heston-small-t",
                            "heston-conjecture", "right-tail-general", "right-tail-special",
                            "left-tail-general", "left-tail-special", "typical"))
    p.add_argument("--branch-ratio", type=float, default=asy.BRANCH_RATIO)

    p = sub.add_parser("verify", help="run an experiment config and write CSV")
    p.add_argument("experiment_config")
    p.add_argument("-o", "--output", help="CSV file (default: standard output)")
    p.add_argument("--format", choices=("csv", "tsv"), default="csv")
    return ap


def _smile(m, args):
    k, t, f = args.kappa, args.t, args.formula
    if f == "carrwu":
        if not isinstance(m, CarrWu):
            raise RegimeError("carrwu formula needs a carrwu model")
        return asy.carrwu_smile(m, k, t, args.side, ratio=args.branch_ratio)
    if f == "merton":
        if not isinstance(m, Merton):
            raise RegimeError("merton formula needs a merton model")
        return asy.merton_smile(m, k, t, args.branch_ratio)
    if f.startswith("heston"):
        if not isinstance(m, Heston):
            raise RegimeError("heston formulas need a heston model")
        return asy.heston_smile(m, k, t, f[len("heston-"):])
    if f == "typical":
        from .models import scaling_data
        return asy.typical_vol(m, k / scaling_data(m).gamma_t(t), t, args.side)
    side = "right" if f.startswith("right") else "left"
    lt = model_tail(m, side, k, t).log_value
    fn = asy.tail_to_vol_right if side == "right" else asy.tail_to_vol_left
    return fn(k, t, lt, special=f.endswith("special"))


def _run(args, out) -> int:
    if args.cmd == "verify":
        cfg = load_experiment(args.experiment_config)
        rep = run_config(cfg)
        data = emit(rep, args.format)
        if args.output:
            with open(args.output, "wb") as fh:
                fh.write(data)
        else:
            out.buffer.write(data) if hasattr(out, "buffer") else out.write(data.decode())
        if rep.convergence is None:
            print("convergence: not enough usable rows for a trend fit", file=sys.stderr)
            return 1 if cfg.max_last_gap is not None else 0
        slope, gap = rep.convergence
        print(f"slope={slope:.6g} last_gap={gap:.6g}", file=sys.stderr)
        if cfg.max_last_gap is not None and not gap <= cfg.max_last_gap:
            print(f"last gap {gap:.6g} exceeds bound {cfg.max_last_gap:g}", file=sys.stderr)
            return 1
        return 0
    m = load_model(args.model_config)
    if args.cmd == "price":
        r = _price(m, args.kappa, args.t, args.method, args.paths, args.seed)
        print(f"call={r.price:.12g} put={put_from_call(r):.12g} log_otm={r.log_price:.12g} "
              f"method={r.method} abs_error_bound={r.abs_error_bound:.3g}", file=out)
        if r.mc_std_error is not None:
            print(f"mc_std_error={r.mc_std_error:.3g} seed={r.seed}", file=out)
    elif args.cmd == "impvol":
        if args.call is not None:
            q = implied_vol(args.kappa, args.t, args.call)
        else:
            r = _price(m, args.kappa, args.t, args.method, args.paths, args.seed)
            q = implied_vol(args.kappa, args.t, log_otm=r.log_price)
        print(f"sigma={q.sigma:.12g} total_vol={q.total_vol:.12g}", file=out)
    elif args.cmd == "tail":
        r = model_tail(m, args.side, args.kappa, args.t)
        print(f"value={r.value:.12g} log_value={r.log_value:.12g} method={r.method} "
              f"abs_error_bound={r.abs_error_bound:.3g}", file=out)
    elif args.cmd == "smile":
        q = _smile(m, args)
        tag = " conjectural" if q.conjectural else ""
        print(f"sigma={q.value:.12g} formula={q.formula}{tag} regime={q.regime!r}", file=out)
    return 0


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return _run(args, out)
    except RegimeError as e:
        print(f"regime mismatch: {e}", file=sys.stderr)
        return EXIT_REGIME
    except AccuracyError as e:
        extra = "" if e.achieved is None else f" (achieved {e.achieved:.3g})"
        print(f"accuracy failure: {e}{extra}", file=sys.stderr)
        return EXIT_ACCURACY
    except (DomainError, DegenerateError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
