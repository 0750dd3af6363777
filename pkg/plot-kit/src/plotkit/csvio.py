"""Reader for the simulator's result CSV format.

The wire format is owned by the producing package; this module only
consumes it. The column order and types are fixed, so anything that
does not match is rejected with the offending line rather than guessed
at.
"""

from __future__ import annotations

from dataclasses import dataclass

COLUMNS = (
    "experiment", "n", "L", "bond", "metric", "mean", "stderr",
    "samples", "seed", "chi_max", "epsilon", "max_discarded",
)
HEADER = ",".join(COLUMNS)


class PlotDataError(Exception):
    """Input CSV cannot be plotted as asked."""


class SchemaError(PlotDataError):
    """Header or row shape differs from the expected columns."""


class NoDataError(PlotDataError):
    """Nothing to draw after reading and filtering."""


@dataclass(frozen=True)
class Row:
    experiment: str
    n: int
    L: int
    bond: int
    metric: str
    mean: float
    stderr: float
    samples: int
    seed: int
    chi_max: int
    epsilon: float
    max_discarded: float


_TYPES = (str, int, int, int, str, float, float, int, int, int, float, float)


def read_rows(path: str) -> list[Row]:
    """Parse a result CSV into typed rows. The header must match the
    producer's column list exactly."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0] != HEADER:
        found = lines[0] if lines else "<empty file>"
        raise SchemaError(
            f"{path}: expected columns '{HEADER}', found '{found}'"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(COLUMNS):
            raise SchemaError(
                f"{path} line {lineno}: {len(parts)} fields, "
                f"expected {len(COLUMNS)}"
            )
        try:
            rows.append(Row(*[cast(p) for cast, p in zip(_TYPES, parts)]))
        except ValueError as exc:
            raise SchemaError(f"{path} line {lineno}: {exc}") from None
    return rows
