"""CSV ingestion for numeric matrices.

The first row is taken as a header when any of its cells fails to parse as a
number. Every other cell must be a finite float; there is no missing-value
support, and offending cells are reported by 1-based line and column.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataValidationError, InputFileError, InvalidArgumentError


@dataclass(frozen=True)
class Table:
    values: np.ndarray
    names: list[str] | None

    def column(self, key: str) -> int:
        """Resolve a column by header name, falling back to a 0-based index."""
        if self.names is not None and key in self.names:
            return self.names.index(key)
        try:
            idx = int(key)
        except ValueError:
            raise InvalidArgumentError(f"no column named {key!r}") from None
        if not 0 <= idx < self.values.shape[1]:
            raise InvalidArgumentError(
                f"column index {idx} out of range for {self.values.shape[1]} columns"
            )
        return idx


def _parse(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def read_csv_matrix(path: str | Path) -> Table:
    path = Path(path)
    try:
        # newline="" lets the csv module handle both LF and CRLF
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh)]
    except FileNotFoundError:
        raise InputFileError(f"cannot read {path}: no such file") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputFileError(f"cannot read {path}: {exc}") from None
    # blank lines (including a trailing one) carry no data
    numbered = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not numbered:
        raise DataValidationError(f"{path} contains no data")
    names = None
    first_line, first = numbered[0]
    if any(_parse(c) is None for c in first):
        names = [c.strip() for c in first]
        numbered = numbered[1:]
        if not numbered:
            raise DataValidationError(f"{path} has a header but no data rows")
    width = len(names) if names is not None else len(numbered[0][1])
    values = np.empty((len(numbered), width))
    for r, (line, row) in enumerate(numbered):
        if len(row) != width:
            raise DataValidationError(
                f"{path}: line {line} has {len(row)} fields, expected {width}", row=line
            )
        for c, cell in enumerate(row):
            v = _parse(cell)
            if v is None:
                raise DataValidationError(
                    f"{path}: line {line}, column {c + 1}: non-numeric value {cell!r}",
                    row=line, col=c + 1,
                )
            values[r, c] = v
    return Table(values, names)


def write_csv_matrix(path: str | Path, values: np.ndarray, names: list[str] | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if names is not None:
            writer.writerow(names)
        for row in np.atleast_2d(values):
            writer.writerow([repr(float(v)) for v in row])
