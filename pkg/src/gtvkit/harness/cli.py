"""Command-line entry point: ``gtvkit run|sweep|verify``.

Exit codes: 0 success, 1 numerical failure or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from gtvkit.errors import GTVError
from gtvkit.harness import verify
from gtvkit.harness.config import load_config, parse_eps_list
from gtvkit.harness.experiments import (
    EXPERIMENTS,
    ORACLES,
    RunConfig,
    convergence_sweep,
    default_config,
    naive_control,
    run_gtv,
    write_csv,
)

# Config-file keys and the RunConfig field each one sets.
_KEYS = {
    "nx": ("nx", int),
    "cfl": ("cfl", float),
    "k": ("K", int),
    "j": ("J", int),
    "t_end": ("t_end", float),
    "eps": ("eps", parse_eps_list),
    "oracle": ("oracle", str),
    "boundary": ("boundary", str),
    "out": ("out", str),
    "x_lo": ("x_lo", float),
    "x_hi": ("x_hi", float),
}


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtvkit", description="Generalized tangent vectors for conservation laws with shocks.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--experiment", choices=sorted(EXPERIMENTS))
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--nx", type=int)
    common.add_argument("--cfl", type=float)
    common.add_argument("--K", type=int)
    common.add_argument("--J", type=int)
    common.add_argument("--t-end", type=float)
    common.add_argument("--eps", type=parse_eps_list, help="comma-separated perturbation sizes")
    common.add_argument("--oracle", choices=ORACLES)
    common.add_argument("--boundary", choices=("outflow", "zero-flux"))
    common.add_argument("--out", help="CSV output path")
    common.add_argument("--scale", type=int, default=1, help="divide nx by this factor")
    common.add_argument("--no-timing", action="store_true",
                        help="write runtime_s as 0 so identical configs give identical CSV")

    run = sub.add_parser("run", parents=[common], help="solve one experiment and report xi, x")
    run.add_argument("--naive", action="store_true",
                     help="negative control: step the variation without the shift")
    sub.add_parser("sweep", parents=[common], help="epsilon convergence sweep")
    ver = sub.add_parser("verify", help="randomized property suite")
    ver.add_argument("--samples", type=int, default=1000)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    experiment = None
    if args.config:
        try:
            raw = load_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        experiment = raw.pop("experiment", None)
        for key, text in raw.items():
            if key not in _KEYS:
                raise UsageError(f"unknown config key {key!r}")
            field, conv = _KEYS[key]
            values[field] = conv(text)

    experiment = args.experiment or experiment
    if experiment is None:
        raise UsageError("no experiment given (use --experiment or a config file)")
    if experiment not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {experiment!r}")

    for flag, field in (("nx", "nx"), ("cfl", "cfl"), ("K", "K"), ("J", "J"),
                        ("t_end", "t_end"), ("eps", "eps"), ("oracle", "oracle"),
                        ("boundary", "boundary"), ("out", "out")):
        value = getattr(args, flag)
        if value is not None:
            values[field] = value
    values["timing"] = not args.no_timing

    config = default_config(experiment, **values)
    return config.scaled(args.scale) if args.scale != 1 else config


def _fmt(values) -> str:
    return ", ".join(f"{v:.6f}" for v in values)


NAIVE_T_END = 0.05


def cmd_run(config: RunConfig, naive_t_end: float | None = None) -> int:
    if naive_t_end is not None:
        rep = naive_control(config, t_end=naive_t_end)
        print(f"naive variation at t={rep.t}: max near shock {rep.max_near:.4f}, "
              f"max elsewhere {rep.max_plateau:.4f}, ratio {rep.ratio:.2f}")
        return 0

    res = run_gtv(config)
    exp = EXPERIMENTS[config.experiment]
    xi_ex = exp.exact_xi(config.t_end)
    print(f"experiment {config.experiment}  nx={config.nx}  t={config.t_end}  steps={res.nsteps}")
    print(f"xi       {_fmt(res.xi)}")
    print(f"xi ref   {_fmt(xi_ex)}")
    print(f"rel err  {_fmt(abs(a - b) / abs(b) for a, b in zip(res.xi, xi_ex))}")
    print(f"x        {_fmt(res.x)}")
    print(f"x ref    {_fmt(exp.exact_x(config.t_end))}")
    if config.timing:
        print(f"runtime  {res.runtime_s:.2f} s")
    return 0


def cmd_sweep(config: RunConfig) -> int:
    rep = convergence_sweep(config)
    print(f"experiment {config.experiment}  nx={config.nx}  oracle={config.oracle}")
    print(f"{'epsilon':>12}  {'L1 diff':>12}")
    for e, l1 in zip(rep.eps, rep.l1):
        print(f"{e:12.6f}  {l1:12.4e}")
    print(f"slope (all)       {rep.slope:.3f}")
    if len(rep.eps) >= 3:
        print(f"slope (largest 3) {rep.tail_slope(3):.3f}")
    print(f"xi      {_fmt(rep.xi_final)}   ref {_fmt(rep.xi_exact)}")
    print(f"x       {_fmt(rep.x_final)}   ref {_fmt(rep.x_exact)}")
    if config.out:
        print(f"wrote {write_csv(rep, config.out)}")
    return 0


def cmd_verify(samples: int) -> int:
    results = verify.run_all(samples=samples)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "verify":
            if args.samples < 1:
                raise UsageError("--samples must be positive")
            return cmd_verify(args.samples)
        config = config_from_args(args)
    except (UsageError, ValueError) as exc:
        parser.error(str(exc))

    try:
        if args.command == "run":
            naive_t = (args.t_end or NAIVE_T_END) if args.naive else None
            return cmd_run(config, naive_t)
        return cmd_sweep(config)
    except (GTVError, FloatingPointError) as exc:
        print(f"gtvkit: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
