"""CSV output with an embedded configuration echo.

Files carry a '#'-prefixed comment block (tool version first, then the
resolved config as TOML lines), a header row, and numeric cells printed
with %.17g so that values round-trip exactly.  NaN cells are serialized
empty and counted in the returned diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolationError


@dataclass(frozen=True)
class CsvDiagnostics:
    path: str
    n_rows: int
    n_nan: int


def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isnan(x):
        return ""
    return f"{x:.17g}"


def write_csv(path, columns: dict, comments=()) -> CsvDiagnostics:
    """Write a rectangular column table; returns row/NaN diagnostics."""
    names = list(columns)
    if not names:
        raise ContractViolationError("cannot write a CSV with no columns")
    arrays = [np.atleast_1d(np.asarray(columns[n])) for n in names]
    n_rows = len(arrays[0])
    if any(len(a) != n_rows for a in arrays):
        raise ContractViolationError(
            f"table is not rectangular: lengths {[len(a) for a in arrays]}"
        )
    n_nan = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for i in range(n_rows):
            cells = []
            for a in arrays:
                cell = _format_cell(a[i])
                if cell == "":
                    n_nan += 1
                cells.append(cell)
            fh.write(",".join(cells) + "\n")
    return CsvDiagnostics(path=str(path), n_rows=n_rows, n_nan=n_nan)


def read_csv(path):
    """Read back a write_csv file: (comment_lines, column dict)."""
    comments = []
    rows = []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line[1:].strip())
                continue
            if header is None:
                header = line.split(",")
                continue
            if line:
                rows.append([float(c) if c else math.nan for c in line.split(",")])
    if header is None:
        raise ContractViolationError(f"{path}: no header row found")
    data = np.asarray(rows, dtype=float) if rows else np.empty((0, len(header)))
    return comments, {name: data[:, i] for i, name in enumerate(header)}


def csv_body(path) -> str:
    """The file content with comment lines stripped (for byte comparisons)."""
    with open(path, "r", encoding="utf-8") as fh:
        return "".join(line for line in fh if not line.startswith("#"))
