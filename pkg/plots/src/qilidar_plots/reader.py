"""Comment-aware CSV reading with strict schema validation.

The producing tool writes one '#'-prefixed metadata line followed by an
exact header row; anything else is a schema mismatch and is reported with
the offending column names.
"""

from __future__ import annotations

import csv
from pathlib import Path

SCHEMAS = {
    "probs": ["quantity", "value"],
    "roc": ["d_llv", "p_d", "p_fa", "regime"],
    "qa_grid": ["n_bar", "bg_s", "qa"],
    "detect_sim": ["z", "llv"],
    "rangefind": ["elapsed_shots", "distance_m", "mu_s", "decision"],
    "pcorrect": ["elapsed_shots", "distance_m", "p_correct"],
}


class SchemaError(ValueError):
    """The CSV does not match the expected qilidar schema."""


def read_table(path: str | Path, kind: str) -> list[dict[str, str]]:
    """Rows of ``path`` validated against the schema for ``kind``.

    Values are returned as strings; figure code converts the columns it
    plots.  Raises SchemaError on a missing/mangled header, column count
    mismatches, or an empty body.
    """
    expected = SCHEMAS[kind]
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if line.strip() and not line.startswith("#")]
    if not lines:
        raise SchemaError(f"{path}: empty file, expected header {expected}")
    rows = list(csv.reader(lines))
    header = rows[0]
    if header != expected:
        raise SchemaError(f"{path}: header mismatch, expected columns {expected}, found {header}")
    body = rows[1:]
    if not body:
        raise SchemaError(f"{path}: no data rows under header {expected}")
    out = []
    for i, row in enumerate(body, start=2):
        if len(row) != len(expected):
            raise SchemaError(
                f"{path}: row {i} has {len(row)} fields, expected {len(expected)} ({expected})"
            )
        out.append(dict(zip(expected, row)))
    return out


def column(rows: list[dict[str, str]], name: str, numeric: bool = True):
    values = [row[name] for row in rows]
    if not numeric:
        return values
    try:
        return [float(v) for v in values]
    except ValueError as exc:
        raise SchemaError(f"column {name!r} is not numeric: {exc}")
