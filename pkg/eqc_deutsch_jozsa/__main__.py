"""
Simulate the Deutsch-Jozsa algorithm with ensemble quantum computation.

Every subcommand writes a CSV table (to stdout or --out) and logs a summary to stderr.
"""

import argparse
import logging
import sys
import typing

from .commands import COMMANDS
from .common import (
    apply_config,
    cap_args,
    common_args,
    dims_args,
    oracle_args,
    output_args,
    params_args,
    parse_float_grid,
    parse_int_list,
    positive_int,
    read_config,
    resolve_oracles,
)
from .models import ExperimentConfig
from .utils import CONSOLE_LOG_HANDLER, LOGGER, ErrorReporter, ValidationError


def main(argv: typing.Optional[typing.Sequence[str]] = None):
    """Run the program."""

    def handler_cb(crash_report: str):
        LOGGER.error("This might be a bug. Crash report:\n\n%s", crash_report)

    try:
        with ErrorReporter(logger=LOGGER, handler_cb=handler_cb) as error_reporter:
            run(error_reporter, argv)
    except KeyboardInterrupt:
        print(file=sys.stderr)
        LOGGER.critical("Quit")
        sys.exit(0)


def run(error_reporter: ErrorReporter, argv: typing.Optional[typing.Sequence[str]] = None):
    """Parse the arguments and run the chosen subcommand."""
    args = parse_args(argv)

    CONSOLE_LOG_HANDLER.setLevel(logging.DEBUG if args.debug else logging.INFO)

    if args.debug:
        error_reporter.set_context_data("--debug", True)

    error_reporter.set_context_data(args.command, True)
    error_reporter.set_context_data("--seed", str(args.seed))
    error_reporter.set_context_data("--workers", str(args.workers))

    oracles = resolve_oracles(args) if hasattr(args, "oracle") else []
    explicit_source = any(
        getattr(args, name, None) for name in ("oracle", "preset", "oracle_file")
    )

    if explicit_source:
        ms = {oracle.m for _, oracle in oracles}

        if len(ms) != 1:
            raise ValidationError(f"All oracles of one run need the same M, got {sorted(ms)}.")

        args.m = ms.pop()

    config = ExperimentConfig.from_args(args, oracles)
    error_reporter.set_context_data("--cap", str(config.cap))
    LOGGER.debug("Running %s with %i oracles, m=%i", config.command, len(oracles), config.m)
    COMMANDS[config.command](config)


def method_arg(parser: argparse.ArgumentParser, default: int) -> None:
    """Add --method."""
    parser.add_argument(
        "--method",
        dest="method",
        type=int,
        choices=[1, 2],
        default=default,
        help="1: parity encoding, 2: coherent-state encoding (default: %(default)s).",
    )


def k0_arg(parser: argparse.ArgumentParser) -> None:
    """Add --k0."""
    parser.add_argument(
        "--k0",
        dest="k0",
        type=positive_int,
        default=1,
        help="Odd S^X Fock label of the Method 1 y-ensemble (default: %(default)s).",
    )


def n_grid_arg(parser: argparse.ArgumentParser) -> None:
    """Add --n-grid."""
    parser.add_argument(
        "--n-grid",
        dest="n_grid",
        type=parse_int_list,
        default=None,
        help="Comma separated particle numbers, used for every ensemble.",
    )


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    """The parser and its subparsers by name."""
    parser = argparse.ArgumentParser(
        description=__doc__.strip().splitlines()[0],
        allow_abbrev=False,
    )
    common_args(parser)
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    commands: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        subparser = subparsers.add_parser(
            name, help=help_text, description=help_text, allow_abbrev=False
        )
        commands[name] = subparser
        return subparser

    qubit_dj = add("qubit-dj", "Run the qubit Deutsch-Jozsa circuit.")
    oracle_args(qubit_dj)

    method = add("method", "Run Method 1 or Method 2 in quantum mode.")
    oracle_args(method)
    dims_args(method)
    method_arg(method, default=2)
    params_args(method)
    k0_arg(method)

    curves = add("curves", "Sample the rotation error curves p^(m) and ε^(m) over τ.")
    curves.add_argument(
        "--kind",
        dest="kind",
        choices=["p", "epsilon", "gaussian"],
        default="p",
        help="p^(m), ε^(m) or the Gaussian form of p^(1) (default: %(default)s).",
    )
    curves.add_argument(
        "--m",
        dest="m",
        type=int,
        choices=[1, 2, 3],
        default=1,
        help="Number of ensembles in the product term (default: %(default)s).",
    )
    dims_args(curves)
    n_grid_arg(curves)
    curves.add_argument(
        "--tau-grid",
        dest="tau_grid",
        type=parse_float_grid,
        default=None,
        help="start:stop:count or comma separated τ values (default: 0:1:201).",
    )
    curves.add_argument(
        "--dense",
        dest="dense",
        action="store_true",
        help="Evolve the product state explicitly instead of using the closed forms.",
    )
    curves.add_argument(
        "--split",
        dest="split",
        action="store_true",
        help="Write one file per N list, named after --out.",
    )

    fit = add("fit", "Fit ln max_τ ε^(m) linearly over N.")
    fit.add_argument(
        "--m",
        dest="m",
        type=int,
        choices=[2, 3],
        default=2,
        help="Order of the error term (default: %(default)s).",
    )
    n_grid_arg(fit)
    fit.add_argument(
        "--equal-partners",
        dest="equal_partners",
        action="store_true",
        help="Sample N₂ = … = N only; the intercept is then not compared with the published one.",
    )

    dephasing = add("decoherence", "Sweep the dephasing strength Γt and record the signal.")
    oracle_args(dephasing)
    dims_args(dephasing)
    method_arg(dephasing, default=1)
    params_args(dephasing)
    k0_arg(dephasing)
    dephasing.add_argument(
        "--gamma-t-grid",
        dest="gamma_t_grid",
        type=parse_float_grid,
        default=None,
        help="start:stop:count or comma separated Γt values (default: 0,0.01,0.1,1).",
    )

    verify = add("oracle-verify", "Check the oracle Hamiltonians against the oracle unitaries.")
    oracle_args(verify)
    params_args(verify)
    verify.add_argument(
        "--random-j",
        dest="random_j",
        type=int,
        default=0,
        help="Additional random j_x draws per oracle (default: %(default)s).",
    )

    for subparser in commands.values():
        output_args(subparser)
        cap_args(subparser)

    return parser, commands


def parse_args(argv: typing.Optional[typing.Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments and fill the gaps from the config file."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = build_parser()
    args = parser.parse_args(argv)

    if args.config:
        apply_config(commands[args.command], args, read_config(args.config), argv)

    if getattr(args, "random_j", 0) < 0:
        raise ValidationError(f"--random-j must be >= 0, got {args.random_j}.")

    return args


if __name__ == "__main__":
    main()
