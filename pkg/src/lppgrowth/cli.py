"""Command-line front end: ``lppgrowth {simulate,exact,tw,asymp,tasep,validate}``.

Exit status: 0 success, 1 a validation criterion failed, 2 invalid arguments
or parameters outside the model's domain, 3 file-system errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path


from . import __version__
from ._validation import DomainError, ModelParams, check_gamma
from .io import (
    sidecar_path,
    write_cdf_table,
    write_convergence,
    write_csv,
    write_json,
    write_samples,
    write_tw_table,
    SAMPLE_HEADER,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DOMAIN = 2
EXIT_IO = 3

log = logging.getLogger("lppgrowth")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise DomainError(message)


def _ladder(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"ladder must be comma-separated integers: {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("ladder entries must be positive")
    return vals


def _s_grid(text):
    """``lo:hi:step`` or a comma-separated list."""
    try:
        if ":" in text:
            lo, hi, step = (float(v) for v in text.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            return [lo + k * step for k in range(n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad s grid {text!r}; use lo:hi:step or a,b,c")


def _model_args(p):
    p.add_argument("--q", type=float, default=0.5, help="geometric parameter in (0, 1)")
    p.add_argument("--gamma", type=float, default=1.0, help="aspect ratio M/N >= 1")
    p.add_argument("--n", type=int, default=20, help="number of rows N")
    p.add_argument("--m", type=int, default=None, help="number of columns M (default floor(gamma N))")
    p.add_argument("--exp", action="store_true", help="exponential weights instead of geometric")


def build_parser():
    parser = _Parser(prog="lppgrowth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="Monte Carlo samples of the corner passage time")
    _model_args(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("exact", help="exact CDF table over an integer range")
    _model_args(p)
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--t-step", type=float, default=1.0, help="grid step for --exp")
    p.add_argument("--tol", type=float, default=1e-12, help="tail truncation tolerance")
    p.add_argument("--rescaled", action="store_true", help="also write s,p at the edge scaling")
    p.add_argument("--out", required=True)

    p = sub.add_parser("tw", help="Tracy-Widom GUE distribution table")
    p.add_argument("--s-grid", type=_s_grid, default=_s_grid("-6:4:0.5"))
    p.add_argument("--method", choices=["fredholm", "painleve", "both"], default="fredholm")
    p.add_argument("--tol", type=float, default=1e-8, help="node-doubling tolerance")
    p.add_argument("--out", required=True)

    p = sub.add_parser("asymp", help="limit constants; with --ladder a convergence report")
    _model_args(p)
    p.add_argument("--ladder", type=_ladder, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("tasep", help="currents Y([ut], t) of continuous-time TASEP")
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--t", type=float, default=500.0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="run the acceptance criteria")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override a tolerance, repeatable")
    p.add_argument("--criteria", type=_ladder, default=None, help="subset, e.g. 1,2,5")
    p.add_argument("--out", default=None, help="JSON report path")
    return parser


def _params(args):
    check_gamma(args.gamma)
    if args.m is not None:
        return ModelParams(q=args.q if not args.exp else 0.5, M=args.m, N=args.n)
    return ModelParams.from_gamma(args.gamma, args.n, args.q if not args.exp else 0.5)


def _manifest(args, argv):
    cfg = {k: v for k, v in vars(args).items() if k != "verbose"}
    return {"command": args.command, "argv": list(argv), "config": cfg, "version": __version__}


def cmd_simulate(args, argv):
    from .growth import WeightKind, monte_carlo_batch

    params = _params(args)
    if args.samples < 0:
        raise DomainError("--samples must be >= 0")
    kind = WeightKind.EXPONENTIAL if args.exp else WeightKind.GEOMETRIC
    batch = monte_carlo_batch(params, args.samples, args.seed, kind=kind, n_jobs=args.jobs)
    write_samples(args.out, batch, _manifest(args, argv))
    log.info("wrote %d samples to %s", batch.raw.size, args.out)
    return EXIT_OK


def cmd_exact(args, argv):
    from .asymptotics import edge_constants, exp_constants
    from .ensemble import exact_cdf_laguerre, meixner_cdf_table

    params = _params(args)
    N = params.N
    if args.exp:
        mean, sc = exp_constants(params.gamma)
    else:
        c = edge_constants(params.gamma, params.q)
        mean, sc = c.omega, c.sigma
    t_max = args.t_max
    if t_max is None:
        t_max = N * mean + 4 * sc * N ** (1 / 3)
    if t_max < args.t_min:
        raise DomainError("--t-max must be >= --t-min")
    if args.exp:
        if args.t_min < 0:
            raise DomainError("--t-min must be >= 0 for the exponential model")
        n = int(math.floor((t_max - args.t_min) / args.t_step + 1e-9)) + 1
        ts = [args.t_min + k * args.t_step for k in range(n)]
        values = [exact_cdf_laguerre(params.M, N, t) for t in ts]
    else:
        ts = range(int(math.floor(args.t_min)), int(math.floor(t_max)) + 1)
        values = meixner_cdf_table(params, ts, tol=args.tol)
    write_cdf_table(args.out, values)
    manifest = _manifest(args, argv)
    manifest["params"] = params.to_dict()
    if args.rescaled:
        center, scale = N * mean, sc * N ** (1 / 3)
        path = Path(args.out).with_name(Path(args.out).stem + "_rescaled.csv")
        write_csv(path, ["s", "t", "p"],
                  ({"s": (v.t - center) / scale, "t": v.t, "p": v.p} for v in values))
        manifest["rescaled"] = {"path": str(path), "center": center, "scale": scale}
    write_json(sidecar_path(args.out), manifest)
    return EXIT_OK


def cmd_tw(args, argv):
    from .tracy_widom import FREDHOLM_RANGE, tw_cdf_fredholm, tw_cdf_painleve

    lo, hi = FREDHOLM_RANGE
    if any(not (lo <= s <= hi) for s in args.s_grid):
        raise DomainError(f"s grid must lie in [{lo}, {hi}]")
    values = []
    for s in args.s_grid:
        if args.method in ("fredholm", "both"):
            values.append(tw_cdf_fredholm(s, tol=args.tol))
        if args.method in ("painleve", "both"):
            values.append(tw_cdf_painleve(s))
    write_tw_table(args.out, values)
    write_json(sidecar_path(args.out), _manifest(args, argv))
    return EXIT_OK


def _constants_report(args):
    from .asymptotics import edge_constants, equilibrium_density, exp_constants, \
        small_deviation_coefficient

    check_gamma(args.gamma)
    if args.exp:
        mean, scale = exp_constants(args.gamma)
        return {"model": "exponential", "gamma": args.gamma, "mean": mean, "scale": scale}
    c = edge_constants(args.gamma, args.q)
    dens = equilibrium_density(args.gamma, args.q)
    return {
        "model": "geometric",
        **c.to_dict(),
        "density_regime": dens.regime.value,
        "density_mass": dens.mass(),
        "small_deviation_coefficient": small_deviation_coefficient(args.gamma, args.q),
    }


def cmd_asymp(args, argv):
    from .asymptotics import convergence_table

    report = _constants_report(args)
    if args.ladder:
        if args.exp:
            raise DomainError("convergence ladders are available for the geometric model only")
        rows = convergence_table(args.gamma, args.q, args.ladder)
        write_convergence(args.out, rows)
        write_json(sidecar_path(args.out), {**_manifest(args, argv), "constants": report})
    else:
        write_json(args.out, {**report, "manifest": _manifest(args, argv)})
    return EXIT_OK


def cmd_tasep(args, argv):
    from .asymptotics import tasep_fluct_params
    from .growth import sample_currents

    if args.t <= 0:
        raise DomainError("--t must be positive")
    if args.samples < 0:
        raise DomainError("--samples must be >= 0")
    center, scale = tasep_fluct_params(args.u, args.t)
    y = sample_currents(args.u, args.t, args.samples, args.seed)
    rows = ({"sample_index": i, "raw": v, "rescaled": (v - center) / scale} for i, v in enumerate(y))
    write_csv(args.out, SAMPLE_HEADER, rows)
    write_json(sidecar_path(args.out), {**_manifest(args, argv), "center": center, "scale": scale})
    return EXIT_OK


def cmd_validate(args, argv):
    from .acceptance import DEFAULT_SEED, parse_tolerances, run_all

    try:
        tol = parse_tolerances(args.tol)
    except ValueError as exc:
        raise DomainError(str(exc))
    seed = DEFAULT_SEED if args.seed is None else args.seed
    results = run_all(seed=seed, tol=tol, numbers=args.criteria)
    passed = all(r.passed for r in results)
    if args.out:
        write_json(args.out, {**_manifest(args, argv), "seed": seed, "tolerances": tol,
                              "passed": passed, "results": [r.to_dict() for r in results]})
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return EXIT_OK if passed else EXIT_VALIDATION


COMMANDS = {
    "simulate": cmd_simulate,
    "exact": cmd_exact,
    "tw": cmd_tw,
    "asymp": cmd_asymp,
    "tasep": cmd_tasep,
    "validate": cmd_validate,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except DomainError as exc:
        print(f"lppgrowth: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args, argv)
    except (DomainError, NotImplementedError) as exc:
        print(f"lppgrowth: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"lppgrowth: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
