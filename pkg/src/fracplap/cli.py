"""
Command-line front end.

    fracplap [--config FILE] [--output-dir DIR] [--threads N] [--log-level L]
             {check-weight,eigen,bounds,solve,bifurcate} [flags]

Flags override the matching fields of the JSON configuration. Exit codes:
0 success, 2 invalid input, 3 solver non-convergence, 4 inconclusive verdict.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pydantic

from fracplap import __version__
from fracplap.commands import RunContext, run_command
from fracplap.core.config import config_hash, load_config, log_level, output_dir
from fracplap.core.errors import FracPlapError, ValidationError
from fracplap.core.logging_config import (
    configure_application_loggers,
    get_logger,
    log_error,
    log_run_start,
    setup_logging,
)
from fracplap.weights import WeightClass

logger = get_logger(__name__)

# (flag destination, config section, config field)
_OVERRIDES = [
    ("n", "domain", "n"),
    ("p", "operator", "p"),
    ("s", "operator", "s"),
    ("N", "operator", "N"),
    ("beta", "weight", "beta"),
    ("dimension", "weight", "dimension"),
    ("tol", "solver", "tol"),
    ("max_iter", "solver", "max_iter"),
    ("seed", "solver", "seed"),
    ("weight_class", "check_weight", "class"),
    ("q", "check_weight", "q"),
    ("p0", "check_weight", "p0"),
    ("q0", "check_weight", "q0"),
    ("numeric", "check_weight", "numeric"),
    ("path_points", "eigen", "path_points"),
    ("simplicity_trials", "eigen", "simplicity_trials"),
    ("n_max", "bounds", "n_max"),
    ("mode", "solve", "mode"),
    ("lam", "solve", "lambda"),
    ("t1", "solve", "t1"),
    ("levels", "solve", "n_levels"),
    ("steps", "bifurcate", "steps"),
    ("step", "bifurcate", "step"),
    ("epsilon", "bifurcate", "epsilon"),
]


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("grid and operator")
    group.add_argument("--n", type=int, help="Interior grid nodes")
    group.add_argument("--p", type=float, help="Operator exponent p > 1")
    group.add_argument("--s", type=float, help="Fractional order s")
    group.add_argument("--beta", type=float, help="Power-weight exponent β")
    group.add_argument("--tol", type=float, help="Solver tolerance")
    group.add_argument("--max-iter", dest="max_iter", type=int, help="Iteration cap")
    group.add_argument("--seed", type=int, help="Seed of every random start")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracplap",
        description="Numerical toolkit for the weighted fractional p-Laplacian.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="JSON configuration file")
    parser.add_argument("--output-dir", dest="output_dir", type=Path, help="Artifact directory")
    parser.add_argument("--threads", type=int, default=1, help="Worker cap for independent runs")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")
    common = _common_flags()

    check = commands.add_parser(
        "check-weight", parents=[common], help="Decide weight class membership"
    )
    check.add_argument("--N", type=int, help="Dimension")
    check.add_argument("--dimension", type=int, help="Ball dimension of the power weight")
    check.add_argument(
        "--class",
        dest="weight_class",
        choices=[weight_class.value for weight_class in WeightClass],
        help="Class to test",
    )
    check.add_argument("--q", type=float, help="Growth exponent of the class")
    check.add_argument("--p0", type=float, help="Lorentz p0 (default N/(sp))")
    check.add_argument("--q0", type=float, help="Lorentz q0")
    check.add_argument(
        "--numeric", action="store_const", const=True, help="Numeric Lorentz branch"
    )

    eigen = commands.add_parser("eigen", parents=[common], help="First and second eigenpairs")
    eigen.add_argument("--oracle", action="store_true", help="Dense p = 2 spectrum CSV")
    eigen.add_argument("--path-points", dest="path_points", type=int, help="Odd path size m")
    eigen.add_argument(
        "--simplicity-trials", dest="simplicity_trials", type=int, help="Seeded restarts"
    )

    bounds = commands.add_parser("bounds", parents=[common], help="De Giorgi L∞ bound")
    bounds.add_argument("solution", type=Path, help="Solution CSV with an x column")
    bounds.add_argument("--column", default="u", help="Column holding the solution")
    bounds.add_argument("--n-max", dest="n_max", type=int, help="De Giorgi levels")

    solve = commands.add_parser("solve", parents=[common], help="Nonlinear problems")
    solve.add_argument("--mode", choices=["fredholm", "small"])
    solve.add_argument("--lambda", dest="lam", type=float, help="λ of the Fredholm problem")
    solve.add_argument("--t1", type=float, help="Truncation level t1")
    solve.add_argument("--levels", type=int, help="Subspace levels of the small search")

    bifurcate = commands.add_parser(
        "bifurcate", parents=[common], help="Branch continuation from λ₁"
    )
    bifurcate.add_argument("--steps", type=int, help="Continuation steps")
    bifurcate.add_argument("--step", type=float, help="Arclength step")
    bifurcate.add_argument("--epsilon", type=float, help="Start amplitude")
    return parser


def overrides_from(args: argparse.Namespace) -> dict[str, dict[str, Any]]:
    """{section: {field: value}} for every flag given on the command line."""
    overrides: dict[str, dict[str, Any]] = {}
    for dest, section, name in _OVERRIDES:
        value = getattr(args, dest, None)
        if value is not None:
            overrides.setdefault(section, {})[name] = value
    if getattr(args, "N", None) is not None and getattr(args, "dimension", None) is None:
        overrides.setdefault("weight", {})["dimension"] = args.N
    return overrides


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the fracplap command."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        # argparse usage errors exit 2, --help and --version exit 0
        return int(exit_.code or 0)

    level = log_level(args.log_level)
    setup_logging(level)
    configure_application_loggers(getattr(logging, level, logging.INFO))

    if args.threads < 1:
        log_error(ValidationError(f"--threads must be >= 1, got {args.threads}"), args.command)
        return ValidationError.exit_code
    try:
        config = load_config(args.config, overrides_from(args))
        digest = config_hash(config)
        log_run_start(args.command, config, digest)
        run = RunContext(
            config=config,
            digest=digest,
            output_dir=output_dir(args.output_dir),
            threads=args.threads,
            oracle=bool(getattr(args, "oracle", False)),
            solution=getattr(args, "solution", None),
            column=getattr(args, "column", "u"),
        )
        outcome = run_command(args.command, run)
    except pydantic.ValidationError as error:
        log_error(error, args.command)
        return ValidationError.exit_code
    except FracPlapError as error:
        log_error(error, args.command)
        return error.exit_code
    except ValueError as error:
        log_error(error, args.command)
        return ValidationError.exit_code

    sys.stdout.write(outcome.stdout)
    logger.info(f"{args.command} finished with exit code {outcome.exit_code}")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
