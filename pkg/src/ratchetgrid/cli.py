"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .config import EXPERIMENT_KINDS, ConfigError, config_from_dict, load_config
from .runner import run_experiment
from .version import __version__

__all__ = ["main", "console_entry"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratchetgrid",
        description=(
            "Simulate information-ratchet power packet routers: single-router "
            "closed-loop runs, control bifurcation sweeps, critical-point "
            "searches, objective landscapes, and coupled router networks."
        ),
    )
    parser.add_argument("--config", metavar="PATH", help="JSON experiment config")
    parser.add_argument(
        "--experiment",
        choices=EXPERIMENT_KINDS,
        help="experiment kind (overrides the config file)",
    )
    parser.add_argument("--seed", type=int, help="base RNG seed (overrides config)")
    parser.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    parser.add_argument(
        "--jobs",
        type=int,
        help="worker pool size for sweeps (default: RATCHET_GRID_JOBS or machine parallelism)",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            config = load_config(args.config)
        elif args.experiment is not None:
            config = config_from_dict({"experiment": args.experiment})
        else:
            raise ConfigError("either --config or --experiment is required")
        overrides = {}
        if args.experiment is not None:
            overrides["experiment"] = args.experiment
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["out"] = args.out
        if overrides:
            raw = config.effective_dict()
            raw.update(overrides)
            config = config_from_dict(raw)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        paths = run_experiment(config, out_dir=args.out, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for path in paths:
        print(path)
    return 0


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
