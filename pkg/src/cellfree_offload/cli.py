"""Command-line entry point: ``simulate``, ``sweep``, ``verify``, ``version``."""

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import load_config, parse_policies
from .exceptions import ConfigError
from .harness import AXES, SweepSpec, emit_csv, emit_gnuplot, run_simulation, run_sweep
from .verify import run_all


def _parse_values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError("--values", f"cannot parse {text!r}") from exc


def _cmd_simulate(args):
    cfg = load_config(args.config)
    policies = parse_policies(args.policies) if args.policies else None
    table = run_simulation(cfg, trials=args.trials, policies=policies)
    raw, agg = emit_csv(table, Path(args.out) / "simulate.csv")
    for a in table.aggregates:
        print(f"{a.bw_policy}:{a.task_policy}  mean cost {a.omega_mean:.6g} +/- {a.omega_ci95:.3g}  ({a.trials} trials)")
    print(f"wrote {raw} and {agg}")
    return 0


def _cmd_sweep(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_overrides(experiment__seed=args.seed)
    settings_policies = parse_policies(args.policies or cfg.get("experiment.policies"))
    spec = SweepSpec(
        axis=args.axis,
        values=tuple(_parse_values(args.values)),
        policies=settings_policies,
        trials=args.trials or int(float(cfg.get("experiment.trials"))),
        seed=int(float(cfg.get("experiment.seed"))),
    )
    table = run_sweep(spec, cfg)
    raw, agg = emit_csv(table, Path(args.out) / f"sweep_{args.axis}.csv")
    script = emit_gnuplot(table, agg)
    print(f"wrote {raw}, {agg} and {script}")
    return 0


def _cmd_verify(args):
    cfg = load_config(args.config)
    results = run_all(cfg, scale=args.scale)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="cellfree-offload", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run all configured policies on the base scenario")
    p.add_argument("--config", help="INI configuration file (defaults built in)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--trials", type=int)
    p.add_argument("--policies", help="comma-separated bw:task pairs, e.g. oba:oto,tdma:oto")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="sweep one parameter and write CSV results")
    p.add_argument("--config")
    p.add_argument("--axis", required=True, choices=sorted(AXES))
    p.add_argument("--values", required=True, help="comma-separated, strictly increasing")
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--policies")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify", help="run the oracle suites; non-zero exit on failure")
    p.add_argument("--config")
    p.add_argument("--scale", type=float, default=1.0, help="multiplier on the number of checked scenarios")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("version")
    p.set_defaults(func=lambda args: print(__version__) or 0)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
