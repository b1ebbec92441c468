"""
covsim Command-Line Interface

    covsim <experiment> [--config PATH] [--seed N] [--out PATH] [--quad-tol X] [--workers N]
    covsim list
    covsim defaults <experiment>

Exit codes: 0 success, 1 config or parameter error, 2 numerical failure.
Diagnostics go to standard error; standard output only ever carries CSV.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from covsim import __version__
from covsim.core.errors import ConfigError, CovsimError, NumericalError, ParameterError, StageError
from covsim.core.experiment_config import (
    EXPERIMENTS,
    default_config_text,
    load_config,
    parse_config_text,
)
from covsim.core.experiment_harness import run_experiment
from covsim.utils.table_io import SweepTable

logger = logging.getLogger("covsim")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root = logging.getLogger("covsim")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False


def _exit_code(exc: CovsimError) -> int:
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_CONFIG


def _output_targets(out: str, outputs: List[Tuple[str, SweepTable]]) -> List[Tuple[str, SweepTable]]:
    if out == "-":
        return [("-", table) for _, table in outputs]
    path = Path(out)
    return [(str(path.with_name(path.stem + suffix + path.suffix)) if suffix else out, table)
            for suffix, table in outputs]


def run_command(args) -> int:
    """Run one experiment and write its CSV output(s)."""
    overrides = {
        "experiment": args.command,
        "seed": args.seed,
        "output_path": args.out,
        "quad_tol": args.quad_tol,
        "workers": args.workers,
    }
    try:
        if args.config:
            config = load_config(args.config, overrides)
        else:
            config = parse_config_text("", overrides)
        outputs = run_experiment(config)
    except (ConfigError, ParameterError) as exc:
        logger.error("❌ %s", exc)
        return EXIT_CONFIG
    except CovsimError as exc:
        logger.error("❌ %s", exc)
        return _exit_code(exc)

    # tables are complete before anything is written
    for target, table in _output_targets(config.output_path, outputs):
        try:
            table.write(sys.stdout if target == "-" else target)
        except OSError as exc:
            logger.error("❌ cannot write %s: %s", target, exc)
            return EXIT_CONFIG
    return EXIT_OK


def list_command(args) -> int:
    for name in EXPERIMENTS:
        print(name)
    return EXIT_OK


def defaults_command(args) -> int:
    sys.stdout.write(default_config_text(args.experiment))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covsim",
        description="covsim - UAV coverage extension with relay hops and multi-hop D2D links",
    )
    parser.add_argument("--version", action="version", version=f"covsim {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on standard error")
    parser.add_argument("-q", "--quiet", action="store_true", help="Only warnings and errors")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    for name in EXPERIMENTS:
        exp_parser = subparsers.add_parser(name, help=f"Run the {name} experiment")
        exp_parser.add_argument("--config", help="Path to a key = value config file")
        exp_parser.add_argument("--seed", type=int, help="RNG seed (overrides the config)")
        exp_parser.add_argument("--out", help="Output CSV path, '-' for standard output")
        exp_parser.add_argument("--quad-tol", dest="quad_tol", type=float,
                                help="Absolute quadrature tolerance for the capacity integral")
        exp_parser.add_argument("--workers", type=int, help="Threads for independent sweep cells")
        exp_parser.set_defaults(handler=run_command)

    list_parser = subparsers.add_parser("list", help="List experiment names")
    list_parser.set_defaults(handler=list_command)

    defaults_parser = subparsers.add_parser("defaults", help="Print a config file with every default")
    defaults_parser.add_argument("experiment", choices=EXPERIMENTS)
    defaults_parser.set_defaults(handler=defaults_command)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors are config errors too
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    _configure_logging(args.verbose, args.quiet)
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
