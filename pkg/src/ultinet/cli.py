"""Command line entry point: ``ultinet simulate | sweep | verify``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .runner import (
    AXES, ExperimentConfig, default_workers, run_simulation, run_seed, sweep, trace_csv,
    write_outputs,
)
from .verify import SUITES, run_suites

# flag -> ExperimentConfig field
FLAG_FIELDS = {
    "n": "n", "fs": "frac_fs", "dsh": "frac_dsh", "dsr": "frac_dsr",
    "rewiring": "rewiring", "reputation": "reputation", "volunteering": "volunteering",
    "iterations_per_agent": "iterations_per_agent", "reps": "repetitions", "seed": "master_seed",
    "lam": "lam", "k": "big_k", "sigma_floor": "sigma_floor", "sigma0": "sigma0",
    "pair_selection": "pair_selection",
}


def _config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    p.add_argument("--n", type=int)
    p.add_argument("--fs", type=float, help="fraction of fixed-strategy agents")
    p.add_argument("--dsh", type=float, help="fraction of DS agents starting near 4.5")
    p.add_argument("--dsr", type=float, help="fraction of DS agents starting near 0.01")
    for name in ("rewiring", "reputation", "volunteering"):
        p.add_argument(f"--{name}", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--iterations-per-agent", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--k", type=float)
    p.add_argument("--sigma-floor", type=float)
    p.add_argument("--sigma0", type=float)
    p.add_argument("--pair-selection", choices=["auto", "edge-uniform", "preference", "agent-neighbor"])
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    base = ExperimentConfig.from_json(args.config).to_dict() if args.config else {}
    for flag, name in FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            base[name] = v
    fracs = {"frac_fs", "frac_dsh", "frac_dsr"}
    given = {FLAG_FIELDS[f] for f in ("fs", "dsh", "dsr") if getattr(args, f) is not None}
    if given == {"frac_fs"}:
        # only --fs: split the rest evenly between the two DS kinds
        cfg = ExperimentConfig.from_dict({k: v for k, v in base.items() if k not in fracs})
        return cfg.with_fs(base["frac_fs"])
    return ExperimentConfig.from_dict(base)


def cmd_simulate(args) -> int:
    config = build_config(args)
    results = sweep(config, "population-size", [config.n], workers=args.workers)
    for path in write_outputs(results, args.out, args.format):
        print(path)
    if args.trace:
        seed = run_seed(config.master_seed, 0)
        res = run_simulation(config, seed, 0, keep_trace=True)
        path = Path(args.out) / "trace.csv"
        path.write_text(trace_csv(res.trace))
        print(path)
    return 0


def _parse_values(axis: str, raw: str) -> list:
    if not raw.strip():
        return []
    cast = int if axis == "population-size" else float
    return [cast(v) for v in raw.split(",")]


def cmd_sweep(args) -> int:
    config = build_config(args)
    values = _parse_values(args.axis, args.values)
    results = sweep(config, args.axis, values, workers=args.workers)
    for path in write_outputs(results, args.out, args.format):
        print(path)
    return 0


def cmd_verify(args) -> int:
    checks = run_suites(args.suite or None, seed=args.seed)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    return 0 if all(c.passed for c in checks) else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultinet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the repetitions of one configuration")
    _config_args(p)
    p.add_argument("--trace", action="store_true", help="also dump the t,avg trace of repetition 0")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a configuration over a list of axis values")
    _config_args(p)
    p.add_argument("--axis", choices=AXES, required=True)
    p.add_argument("--values", required=True, help="comma separated, e.g. 0,0.3,0.5,0.8")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
