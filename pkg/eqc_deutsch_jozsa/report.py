"""CSV output, companion plot scripts and the bounded sweep pool."""

import csv
import io
import math
import sys
import typing
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .models import LogReal
from .utils import LOGGER, ValidationError

T = typing.TypeVar("T")
R = typing.TypeVar("R")

#: Sentinel written for log values of exact zeros.
NEG_INF = "-inf"

Cell = typing.Union[str, int, float, LogReal, None]


def fmt_float(value: float) -> str:
    """Fixed-precision scientific notation with 12 significant digits."""
    if math.isinf(value):
        return NEG_INF if value < 0 else "inf"

    return f"{value:.11e}"


def fmt_log10(value: LogReal) -> str:
    """log10 of a LogReal magnitude, ``-inf`` for exact zeros."""
    if value.is_zero:
        return NEG_INF

    return fmt_float(value.log10)


def fmt_cell(value: Cell) -> str:
    """Format one CSV cell."""
    if value is None:
        return ""

    if isinstance(value, LogReal):
        return fmt_log10(value)

    if isinstance(value, bool):
        return str(value).lower()

    if isinstance(value, float):
        return fmt_float(value)

    return str(value)


def run_sweep(
    func: typing.Callable[[T], R], points: typing.Sequence[T], workers: int = 4
) -> list[R]:
    """Evaluate ``func`` on every point with a bounded pool; results keep the input order."""
    if workers < 1:
        raise ValidationError(f"At least one worker is required, got {workers}.")

    if workers == 1 or len(points) <= 1:
        return [func(point) for point in points]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, points))


class CsvReport:
    """Buffered CSV table, written in one go by a single writer."""

    def __init__(self, columns: typing.Sequence[str]):
        self.columns = list(columns)
        self.rows: list[list[str]] = []

    def add(self, *values: Cell) -> None:
        """Append a row."""
        if len(values) != len(self.columns):
            raise ValueError(f"Row has {len(values)} cells, header has {len(self.columns)}.")

        self.rows.append([fmt_cell(value) for value in values])

    def render(self) -> str:
        """The table as CSV text."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buffer.getvalue()

    def write(self, out: typing.Optional[Path]) -> None:
        """Write to ``out`` or to stdout."""
        text = self.render()

        if out is None:
            sys.stdout.write(text)
            return

        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        LOGGER.info("Wrote %i rows to %s", len(self.rows), out)


def write_plot_stub(
    csv_path: Path, x_column: str, y_column: str, group_columns: typing.Sequence[str]
) -> Path:
    """Write a matplotlib script next to ``csv_path`` that plots y over x per group."""
    stub_path = csv_path.with_suffix(".plot.py")
    groups = ", ".join(repr(column) for column in group_columns)
    stub_path.write_text(
        f'''"""Plot {csv_path.name}."""

import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(lambda: ([], []))


def value(cell):
    try:
        return float(cell)
    except ValueError:
        return cell


with open({csv_path.name!r}, newline="") as csv_file:
    for row in csv.DictReader(csv_file):
        if not row[{x_column!r}] or not row[{y_column!r}]:
            continue

        key = tuple(row[column] for column in ({groups},))
        curves[key][0].append(value(row[{x_column!r}]))
        curves[key][1].append(float(row[{y_column!r}]))

for key, (xs, ys) in sorted(curves.items()):
    plt.plot(xs, ys, label=", ".join(key))

plt.xlabel({x_column!r})
plt.ylabel({y_column!r})
plt.legend()
plt.savefig({csv_path.with_suffix(".pdf").name!r})
'''
    )
    LOGGER.info("Wrote plot script %s", stub_path)
    return stub_path
