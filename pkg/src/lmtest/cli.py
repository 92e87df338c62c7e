"""Command-line interface: ``lmtest {test,simulate,quantiles,reproduce}``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .errors import InvalidInput, LMTestError
from .io import RunConfig, SimulationConfig, format_pair, load_json, read_pair
from .nulldist import (DEFAULT_D_GRID, DEFAULT_GRID_SIZE, DEFAULT_REPS,
                       SHIPPED_COEFFICIENTS, QuantileModel, fit_quantile_model,
                       shipped_model)
from .pipeline import run_test
from .simgen import BivariateNoiseSpec, FarimaSpec, gen_bivariate
from .tables import DESK_REPS, FULL_REPS, format_table, reproduce_table, to_csv

EXIT_OK, EXIT_USAGE = 0, 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("usage", message)
        raise SystemExit(EXIT_USAGE)


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()] if text else []


def _write(text: str, path: Optional[str]) -> None:
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_model(path: Optional[str]) -> QuantileModel:
    return QuantileModel.load(path) if path else shipped_model()


def cmd_test(args) -> int:
    cfg = RunConfig(inputs=[args.input], alpha=args.alpha,
                    variant=args.variant, q=args.q, estimator=args.estimator,
                    p_max=args.pmax, seed=args.seed, output=args.out)
    pair, _ = read_pair(args.input)
    report = run_test(pair, variant=cfg.variant, alpha=cfg.alpha, q=cfg.q,
                      estimator=cfg.estimator, p_max=cfg.p_max,
                      quantile_model=_load_model(args.quantile_model),
                      swap=args.swap, seed=cfg.seed)
    _write(report.to_json() + "\n", cfg.output)
    return EXIT_OK


def _simulation_config(args) -> SimulationConfig:
    if args.config:
        data = load_json(args.config)
        data.setdefault("seed", args.seed)
        return SimulationConfig.from_dict(data)
    if args.p is not None:
        noise = BivariateNoiseSpec.from_p(args.p)
    else:
        noise = BivariateNoiseSpec()
    return SimulationConfig(
        spec1=FarimaSpec(args.d1, tuple(_floats(args.ar1)),
                         tuple(_floats(args.ma1))),
        spec2=FarimaSpec(args.d2, tuple(_floats(args.ar2)),
                         tuple(_floats(args.ma2))),
        noise=noise, n=args.n, burn_in=args.burn_in, seed=args.seed)


def cmd_simulate(args) -> int:
    sim = _simulation_config(args)
    pair = gen_bivariate(sim.spec1, sim.spec2, sim.noise, sim.n, sim.burn_in,
                         seed=sim.seed)
    comment = "lmtest simulate " + json.dumps(sim.to_dict(), sort_keys=True)
    _write(format_pair(pair, comment), args.out)
    return EXIT_OK


def cmd_quantiles(args) -> int:
    d_grid = _floats(args.d_grid) if args.d_grid else list(DEFAULT_D_GRID)
    model = fit_quantile_model(args.alpha, d_grid, args.reps, args.grid_size,
                               args.seed)
    lines = [f"# alpha={model.alpha} reps={model.replications} "
             f"N={model.grid_size} seed={model.seed}",
             f"# fitted: {model.coefficients[0]:.3f} d^2 + "
             f"{model.coefficients[1]:.3f} d + {model.coefficients[2]:.3f}"
             f"  (max residual {model.max_residual:.3f})",
             f"# shipped: {SHIPPED_COEFFICIENTS[0]} d^2 + "
             f"{SHIPPED_COEFFICIENTS[1]} d + {SHIPPED_COEFFICIENTS[2]}",
             f"{'d':>6} {'mc':>8} {'se':>7} {'fitted':>8} {'shipped':>8}"]
    shipped = shipped_model()
    for (d, q), se in zip(model.mc_table, model.mc_se):
        lines.append(f"{d:>6.2f} {q:>8.3f} {se:>7.3f} {model(d):>8.3f} "
                     f"{shipped(d):>8.3f}")
    print("\n".join(lines), file=sys.stderr if args.out in (None, "-")
          else sys.stdout)
    _write(model.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    reps = FULL_REPS if args.full else args.reps
    filters = {k: getattr(args, k) for k in ("d1", "d2", "a1", "a2", "p", "n")
               if getattr(args, k) is not None}
    results = reproduce_table(args.table, reps=reps, seed=args.seed,
                              quantile_model=_load_model(args.quantile_model),
                              **filters)
    if not results:
        raise InvalidInput(f"no cells of table {args.table} match {filters}")
    print(format_table(args.table, results))
    if args.out:
        _write(to_csv(results), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lmtest", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("test", help="test d1 = d2 on a two-column file")
    p.add_argument("input", help="CSV or whitespace-delimited two-column file")
    p.add_argument("--variant", default="plain",
                   choices=["plain", "residualized", "one-sided"],
                   help="statistic to report (default: plain)")
    p.add_argument("--alpha", type=float, default=0.05,
                   help="nominal level (default: 0.05)")
    p.add_argument("--q", type=int, default=None,
                   help="fixed HAC bandwidth (default: adaptive)")
    p.add_argument("--estimator", default="fexp",
                   choices=["fexp", "lw", "gph"],
                   help="memory estimator (default: fexp)")
    p.add_argument("--pmax", type=int, default=10,
                   help="largest AR order for the bandwidth fit")
    p.add_argument("--quantile-model", default=None,
                   help="JSON model written by `lmtest quantiles`")
    p.add_argument("--swap", action="store_true",
                   help="exchange the columns (alternative d1 < d2)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for a simulated critical value, if one is needed")
    p.add_argument("--out", default=None, help="JSON report path")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="write a simulated FARIMA pair")
    p.add_argument("--config", default=None, help="JSON simulation config")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--d1", type=float, default=0.0)
    p.add_argument("--d2", type=float, default=0.0)
    p.add_argument("--ar1", default="", help="comma-separated AR coefficients")
    p.add_argument("--ar2", default="")
    p.add_argument("--ma1", default="", help="comma-separated MA coefficients")
    p.add_argument("--ma2", default="")
    p.add_argument("--p", type=float, default=None,
                   help="innovation mixing parameter in [0, 0.5)")
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("quantiles", help="regenerate the quantile model")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=DEFAULT_REPS,
                   help="bridge pairs per grid point")
    p.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE,
                   help="time points per simulated bridge")
    p.add_argument("--d-grid", default=None, help="comma-separated d values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_quantiles)

    p = sub.add_parser("reproduce", help="rejection-frequency tables")
    p.add_argument("table", type=int, choices=range(1, 7))
    p.add_argument("--reps", type=int, default=DESK_REPS)
    p.add_argument("--full", action="store_true",
                   help=f"{FULL_REPS} replications per cell")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quantile-model", default=None)
    for name in ("d1", "d2", "a1", "a2", "p"):
        p.add_argument(f"--{name}", type=float, default=None,
                       help=f"restrict to cells with this {name}")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV output path")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LMTestError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return exc.exit_code
    except (OSError, ValueError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
