"""Common helper functions of the command line interface."""

import argparse
import configparser
import math
import typing
from pathlib import Path

import termcolor

from .models import BooleanOracle, OracleClass, OracleParams, parse_oracle_arg
from .oracles import PRESETS, enumerate_all, preset, read_oracle_file
from .utils import (
    CAP_ENV_VAR,
    DEFAULT_DENSITY_CAP,
    ExceptionGroupCompat,
    ValidationError,
)

#: Section of the config file and of parameter files.
CONFIG_SECTION = "eqcdj"
PARAMS_SECTION = "params"

DEFAULT_SEED = 1729


def common_args(parser: argparse.ArgumentParser):
    """Add common args to a argparse parser."""
    from . import __version__  # pylint: disable=import-outside-toplevel

    parser.add_argument(
        "--debug",
        dest="debug",
        action="store_true",
        help="Print debug messages",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    parser.add_argument(
        "--config",
        dest="config",
        metavar="PATH",
        type=Path,
        default=None,
        help=f"INI file with a [{CONFIG_SECTION}] section of flag defaults; flags override it.",
    )


def output_args(parser: argparse.ArgumentParser) -> None:
    """Add the CSV output arguments."""
    parser.add_argument(
        "--out",
        dest="out",
        metavar="PATH",
        type=Path,
        default=None,
        help="Write the CSV to this file (default: stdout).",
    )
    parser.add_argument(
        "--plot-stub",
        dest="plot_stub",
        action="store_true",
        help="Also write a matplotlib script next to the CSV (needs --out).",
    )


def cap_args(parser: argparse.ArgumentParser) -> None:
    """Add the seed, worker pool and dimension cap arguments."""
    parser.add_argument(
        "--seed",
        dest="seed",
        type=int,
        default=DEFAULT_SEED,
        help="Seed of every random draw (default: %(default)s).",
    )
    parser.add_argument(
        "--workers",
        dest="workers",
        type=positive_int,
        default=4,
        help="Size of the sweep worker pool (default: %(default)s).",
    )
    parser.add_argument(
        "--cap",
        dest="cap",
        type=positive_int,
        default=None,
        help=f"Cap on dense state dimensions (default: ${CAP_ENV_VAR} or 2^24).",
    )
    parser.add_argument(
        "--density-cap",
        dest="density_cap",
        type=positive_int,
        default=DEFAULT_DENSITY_CAP,
        help="Cap on the dimension of dense density matrices (default: %(default)s).",
    )


def oracle_args(parser: argparse.ArgumentParser) -> None:
    """Add the oracle source arguments: tables, presets or files (default: all of --m)."""
    source = parser.add_mutually_exclusive_group()
    source.add_argument(
        "--oracle",
        dest="oracle",
        action="append",
        metavar="TABLE",
        type=parse_oracle_arg,
        help="Truth table such as 1001, character x being f(x). Repeatable.",
    )
    source.add_argument(
        "--preset",
        dest="preset",
        action="append",
        choices=list(PRESETS),
        help="Named oracle. Repeatable.",
    )
    source.add_argument(
        "--oracle-file",
        dest="oracle_file",
        action="append",
        metavar="PATH",
        type=Path,
        help="File containing one truth table line. Repeatable.",
    )
    parser.add_argument(
        "--m",
        dest="m",
        type=positive_int,
        default=2,
        help="Number of input bits when all oracles are enumerated (default: %(default)s).",
    )


def dims_args(parser: argparse.ArgumentParser) -> None:
    """Add the ensemble size arguments."""
    parser.add_argument(
        "--n",
        dest="n",
        action="append",
        type=positive_int,
        help="Particles per x-register ensemble; once for all ensembles or once per ensemble.",
    )
    parser.add_argument(
        "--n0",
        dest="n0",
        type=positive_int,
        default=None,
        help="Particles in the y-ensemble (default: the first --n).",
    )


def params_args(parser: argparse.ArgumentParser) -> None:
    """Add the oracle Hamiltonian parameter arguments."""
    parser.add_argument(
        "--params",
        dest="params",
        choices=["zero", "recommended", "file"],
        default="zero",
        help="j_x choice: all zero, j_x = -x1 for balanced oracles, or --params-file.",
    )
    parser.add_argument(
        "--params-file",
        dest="params_file",
        metavar="PATH",
        type=Path,
        default=None,
        help=f"INI file with a [{PARAMS_SECTION}] section mapping x to j_x (and j_const).",
    )


def positive_int(value: str) -> int:
    """argparse type for integers >= 1."""
    try:
        number = int(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(
            termcolor.colored(f"Invalid integer {value!r}.", "red")
        ) from err

    if number < 1:
        raise argparse.ArgumentTypeError(termcolor.colored(f"{number} is not positive.", "red"))

    return number


def parse_float_grid(value: str) -> list[float]:
    """Parse ``start:stop:count`` (inclusive, evenly spaced) or a comma separated list."""
    try:
        if ":" in value:
            start, stop, count = value.split(":")
            points = int(count)

            if points < 1:
                raise ValueError("count must be >= 1")

            if points == 1:
                grid = [float(start)]
            else:
                step = (float(stop) - float(start)) / (points - 1)
                grid = [float(start) + index * step for index in range(points)]
        else:
            grid = [float(item) for item in value.split(",") if item.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(
            termcolor.colored(f"Invalid grid {value!r}: {err}", "red")
        ) from err

    if not grid or not all(math.isfinite(point) for point in grid):
        raise argparse.ArgumentTypeError(
            termcolor.colored(f"Grid {value!r} must be non-empty and finite.", "red")
        )

    return grid


def parse_int_list(value: str) -> list[int]:
    """Parse a comma separated list of integers."""
    try:
        items = [int(item) for item in value.split(",") if item.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(
            termcolor.colored(f"Invalid integer list {value!r}.", "red")
        ) from err

    if not items:
        raise argparse.ArgumentTypeError(termcolor.colored("Empty integer list.", "red"))

    return items


def read_config(path: Path) -> dict[str, str]:
    """Read the ``[eqcdj]`` section of an INI config file."""
    config = configparser.ConfigParser()

    try:
        with path.open() as config_file:
            config.read_file(config_file)
    except (OSError, configparser.Error) as err:
        raise ValidationError(f"Could not read config file {path}: {err}") from err

    if not config.has_section(CONFIG_SECTION):
        raise ValidationError(f"Config file {path} has no [{CONFIG_SECTION}] section.")

    return dict(config.items(CONFIG_SECTION))


def _given_dests(parser: argparse.ArgumentParser, argv: typing.Sequence[str]) -> set[str]:
    # Exact option strings only: the parsers are built with allow_abbrev=False.
    given = set()

    for action in parser._actions:  # pylint: disable=protected-access
        for option in action.option_strings:
            if any(token == option or token.startswith(option + "=") for token in argv):
                given.add(action.dest)

    return given


def _convert(parser: argparse.ArgumentParser, action: argparse.Action, raw: str) -> typing.Any:
    # pylint: disable-next=protected-access
    if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
        return raw.strip().lower() in ("1", "yes", "true", "on")

    convert = action.type or str

    def one(item: str) -> typing.Any:
        try:
            value = convert(item)  # type: ignore[operator]
        except (argparse.ArgumentTypeError, ValueError) as err:
            raise ValidationError(
                f"Invalid config value {raw!r} for {action.dest} in {parser.prog}: {err}"
            ) from err

        if action.choices is not None and value not in action.choices:
            raise ValidationError(f"Invalid config value {raw!r} for {action.dest}.")

        return value

    if isinstance(action, argparse._AppendAction):  # pylint: disable=protected-access
        return [one(item) for item in raw.split()]

    return one(raw)


def apply_config(
    parser: argparse.ArgumentParser,
    args: argparse.Namespace,
    values: dict[str, str],
    argv: typing.Sequence[str],
) -> argparse.Namespace:
    """Fill ``args`` from config ``values`` for every option not given on the command line."""
    actions = {
        action.dest: action
        for action in parser._actions  # pylint: disable=protected-access
        if action.option_strings
    }
    unknown = sorted(set(values) - set(actions))

    if unknown:
        raise ValidationError(f"Unknown config keys for {parser.prog}: {', '.join(unknown)}.")

    given = _given_dests(parser, argv)

    for dest, raw in values.items():
        if dest not in given:
            setattr(args, dest, _convert(parser, actions[dest], raw))

    return args


def resolve_oracles(args: argparse.Namespace) -> list[tuple[str, BooleanOracle]]:
    """Collect (id, oracle) pairs from the oracle source arguments."""
    if getattr(args, "oracle", None):
        return [(str(oracle), oracle) for oracle in args.oracle]

    if getattr(args, "preset", None):
        return [(name, preset(name)) for name in args.preset]

    if getattr(args, "oracle_file", None):
        oracles = []
        errors: list[Exception] = []

        for path in args.oracle_file:
            try:
                oracles.append((path.name, read_oracle_file(path)))
            except ValidationError as err:
                errors.append(err)

        if errors:
            raise ExceptionGroupCompat("Some oracle files could not be read.", errors)

        return oracles

    return [(str(oracle), oracle) for oracle in enumerate_all(args.m)]


def read_params_file(path: Path) -> OracleParams:
    """Read j_x values from the ``[params]`` section of an INI file."""
    config = configparser.ConfigParser()

    try:
        with path.open() as params_file:
            config.read_file(params_file)

        items = dict(config.items(PARAMS_SECTION))
        j_const = int(items.pop("j_const", "0"))
        return OracleParams({int(x): int(j) for x, j in items.items()}, j_const=j_const)
    except (OSError, configparser.Error, ValueError) as err:
        raise ValidationError(f"Could not read parameter file {path}: {err}") from err


def resolve_params(
    choice: str, oracle: BooleanOracle, params_file: typing.Optional[Path] = None
) -> OracleParams:
    """The OracleParams selected by ``--params``; constants get zero under ``recommended``."""
    from .method2 import recommended_params  # pylint: disable=import-outside-toplevel

    if choice == "zero":
        return OracleParams()

    if choice == "recommended":
        if oracle.oracle_class is OracleClass.BALANCED:
            return recommended_params(oracle)

        return OracleParams()

    if choice == "file":
        if params_file is None:
            raise ValidationError("--params file needs --params-file.")

        return read_params_file(params_file).validate(oracle)

    raise ValidationError(f"Unknown parameter choice {choice!r}.")
