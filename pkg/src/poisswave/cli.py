"""Command-line experiment driver.

Subcommands:
  signals      list the built-in intensities
  reconstruct  one realisation, one thresholded estimate, gridded CSV
  calibrate    Monte-Carlo average of the exact risk-ratio curve R(gamma)
  compare      per-replication MSE of the thresholding rule vs baselines
  check-bound  Monte-Carlo check of the logarithmic oracle-risk bound

All randomness is keyed by (seed, replication, purpose), so outputs are
byte-identical for a given seed regardless of execution order.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import rng as streams
from .baselines import anscombe_uni, default_bins
from .estimator import ThresholdParams, default_j0, estimate, estimation_window
from .risk import (StepCurve, UniformGrid, average_curves, coeff_risk,
                   gamma_min, l2_grid_risk, oracle_risk, risk_curve)
from .signals import SIGNALS, SignalSpec, gauss_mixture, sample_points
from .wavelets import get_basis, reconstruct, true_maps

FOCUS_SIGNALS = ("Haar1", "Gauss1", "Bumps")


class ConfigError(Exception):
    pass


class NumericAbort(Exception):
    pass


def _resolve_signal(args) -> SignalSpec:
    if args.signal == "GaussMix":
        if args.d is None:
            raise ConfigError("GaussMix requires --d")
        return gauss_mixture(args.d)
    try:
        return SIGNALS[args.signal]
    except KeyError:
        raise ConfigError(
            f"unknown signal {args.signal!r}; choose from "
            f"{sorted(SIGNALS)} or GaussMix") from None


def _config_comment(args, **extra) -> str:
    pairs = {k: v for k, v in sorted(vars(args).items())
             if k not in ("func", "out") and v is not None}
    pairs.update(extra)
    return "config: " + " ".join(f"{k}={v}" for k, v in pairs.items())


def _write_csv(path, comment: str, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {comment}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def cmd_signals(args) -> int:
    for name, s in SIGNALS.items():
        lo, hi = s.support
        print(f"{name:8s}  mass={s.l1_norm:.6g}  sup={s.sup_norm:.6g}  "
              f"support=[{lo:g}, {hi:g}]")
    print("GaussMix  two unit-variance Gaussians at 0 and d (use --d)")
    return 0


def cmd_reconstruct(args) -> int:
    if args.reps is not None and args.reps > 1:
        print("warning: reconstruct uses a single realisation; --reps ignored",
              file=sys.stderr)
    signal = _resolve_signal(args)
    basis = get_basis(args.basis)
    j0 = args.j0 if args.j0 is not None else 10
    sample = sample_points(signal, args.n, streams.substream(args.seed, 0))
    window = estimation_window(basis, sample, signal)
    params = ThresholdParams(args.gamma, args.n, j0, args.variant, window)
    kept = estimate(sample, basis, params)
    grid = UniformGrid(window[0], window[1], args.grid)
    x = grid.midpoints
    est = reconstruct(basis, kept, x)
    truth = signal.pdf(x)
    _write_csv(args.out, _config_comment(args, j0=j0, kept=len(kept)),
               "x,f_true,f_estimate",
               zip(x.tolist(), truth.tolist(), est.tolist()))
    print(f"kept {len(kept)} coefficients; wrote {args.out}")
    return 0


def cmd_calibrate(args) -> int:
    signal = _resolve_signal(args)
    basis = get_basis(args.basis)
    j0 = args.j0 if args.j0 is not None else default_j0(args.n)
    reps = args.reps if args.reps is not None else \
        (1000 if args.signal in FOCUS_SIGNALS else 100)
    curves = []
    for rep in range(reps):
        sample = sample_points(signal, args.n, streams.substream(args.seed, rep))
        try:
            curves.append(risk_curve(sample, signal, basis, args.n, j0))
        except ValueError as exc:
            raise NumericAbort(f"replication {rep}: {exc}") from exc
    avg = average_curves(curves)
    gmin = gamma_min(avg, args.gamma_cap)
    avg.to_csv(args.out, _config_comment(args, j0=j0, reps=reps,
                                         gamma_min=f"{gmin:.17g}"))
    print(f"gamma_min={gmin:.6g} over (0, {args.gamma_cap:g}]; "
          f"R(1)={avg(1.0):.6g}; wrote {args.out}")
    return 0


def _load_external(path, reps: int, m: int) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read external estimates: {exc}") from exc
    if data.shape != (reps, m):
        raise ConfigError(
            f"external CSV must be {reps} rows x {m} grid values, "
            f"got {data.shape}")
    return data


def cmd_compare(args) -> int:
    signal = _resolve_signal(args)
    j0 = args.j0 if args.j0 is not None else 10
    reps = args.reps if args.reps is not None else 100
    bins = args.bins if args.bins is not None else default_bins(args.n)
    methods = list(args.methods)
    external = {}
    for spec_str in args.external or []:
        name, _, path = spec_str.partition("=")
        if not path:
            raise ConfigError("--external expects name=path")
        methods.append(name)
        external[name] = path
    rows = []
    ext_data = {}
    for rep in range(reps):
        sample = sample_points(signal, args.n, streams.substream(args.seed, rep))
        if sample.count < 2:
            raise NumericAbort(f"replication {rep}: too few points to form a window")
        window = (float(sample.points[0]), float(sample.points[-1]))
        grid = UniformGrid(window[0], window[1], args.grid)
        row = [rep]
        for method in methods:
            if method in ("rand-thresh-haar", "rand-thresh-spline"):
                basis = get_basis("haar" if method.endswith("haar") else "spline15")
                params = ThresholdParams(args.gamma, args.n, j0, args.variant,
                                         estimation_window(basis, sample, signal))
                est = reconstruct(basis, estimate(sample, basis, params),
                                  grid.midpoints)
            elif method in ("anscombe-uni", "anscombe-uni-ti"):
                binwise = anscombe_uni(sample, window, bins,
                                       translation_invariant=method.endswith("-ti"))
                idx = np.minimum((np.arange(args.grid) * bins) // args.grid,
                                 bins - 1)
                est = binwise[idx]
            elif method in external:
                if method not in ext_data:
                    ext_data[method] = _load_external(external[method], reps, args.grid)
                est = ext_data[method][rep]
            else:
                raise ConfigError(f"unknown method {method!r}")
            row.append(l2_grid_risk(est, signal, grid))
        rows.append(row)
    _write_csv(args.out, _config_comment(args, j0=j0, reps=reps, bins=bins),
               "rep," + ",".join(methods), rows)
    med = {m: float(np.median([r[i + 1] for r in rows]))
           for i, m in enumerate(methods)}
    print("median MSE: " + "  ".join(f"{m}={v:.6g}" for m, v in med.items()))
    print(f"wrote {args.out}")
    return 0


def cmd_check_bound(args) -> int:
    signal = _resolve_signal(args)
    basis = get_basis("haar")
    j0 = args.j0 if args.j0 is not None else default_j0(args.n)
    reps = args.reps if args.reps is not None else 200
    gamma = 1.0 + math.sqrt(2.0)
    losses = []
    oracle = None
    for rep in range(reps):
        sample = sample_points(signal, args.n, streams.substream(args.seed, rep))
        window = estimation_window(basis, sample, signal)
        beta, var = true_maps(basis, signal, window, j0, args.n)
        if oracle is None:
            # window can vary by replication for unbounded signals; track the max
            oracle = oracle_risk(beta, var)
        else:
            oracle = max(oracle, oracle_risk(beta, var))
        params = ThresholdParams(gamma, args.n, j0, "theoretical", window)
        losses.append(coeff_risk(estimate(sample, basis, params), beta))
    mean = float(np.mean(losses))
    se = float(np.std(losses, ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    bound = 12.0 * math.log(args.n) * (oracle + 1.0 / args.n)
    ok = mean + 2.0 * se <= bound
    print(f"mean loss {mean:.6g} (+2se {mean + 2 * se:.6g}) vs bound {bound:.6g} "
          f"[gamma={gamma:.6g}, oracle={oracle:.6g}]: {'PASS' if ok else 'FAIL'}")
    if args.out:
        _write_csv(args.out, _config_comment(args, gamma=gamma, bound=bound),
                   "rep,coeff_risk", list(enumerate(losses)))
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="poisswave",
                                description="Poisson intensity estimation by "
                                            "data-driven wavelet thresholding")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True):
        sp.add_argument("--signal", required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--j0", type=int, default=None)
        sp.add_argument("--gamma", type=float, default=1.0)
        sp.add_argument("--reps", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--grid", type=int, default=1 << 14)
        sp.add_argument("--variant", choices=("simulation", "theoretical"),
                        default="simulation")
        sp.add_argument("--d", type=float, default=None,
                        help="separation for the GaussMix signal")
        sp.add_argument("--out", required=out_required)

    sp = sub.add_parser("signals", help="list built-in intensities")
    sp.add_argument("what", nargs="?", default="list", choices=("list",))
    sp.set_defaults(func=cmd_signals)

    sp = sub.add_parser("reconstruct", help="single-realisation estimate on a grid")
    common(sp)
    sp.add_argument("--basis", choices=("haar", "spline15"), default="haar")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("calibrate", help="average risk-ratio curve over gamma")
    common(sp)
    sp.add_argument("--basis", choices=("haar", "spline15"), default="haar")
    sp.add_argument("--gamma-cap", type=float, default=400.0)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("compare", help="per-replication MSE for each method")
    common(sp)
    sp.add_argument("--methods", nargs="+",
                    default=["rand-thresh-haar", "rand-thresh-spline",
                             "anscombe-uni", "anscombe-uni-ti"])
    sp.add_argument("--bins", type=int, default=None,
                    help="bin count for the Anscombe baselines "
                         "(default: power of 2 nearest sqrt(n))")
    sp.add_argument("--external", action="append", default=None,
                    metavar="NAME=PATH",
                    help="CSV of reps x grid externally produced estimates")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("check-bound", help="logarithmic oracle-bound check")
    common(sp, out_required=False)
    sp.set_defaults(func=cmd_check_bound)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericAbort as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
