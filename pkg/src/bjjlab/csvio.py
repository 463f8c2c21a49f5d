"""Tabular output: ``#`` metadata lines, one header line, fixed-precision rows.

Floats are written in scientific notation with a fixed number of significant
digits, so parsing a file and writing it back reproduces it byte for byte.
"""
from __future__ import annotations

import io
import math
import os
import tempfile
from dataclasses import dataclass, field

DEFAULT_PRECISION = 12


def format_float(value: float, precision: int = DEFAULT_PRECISION) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{precision - 1}e}"


@dataclass
class Table:
    columns: list[str]
    rows: list[list[float]]
    metadata: dict[str, str] = field(default_factory=dict)

    def column(self, name: str) -> list[float]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def dumps(table: Table, precision: int = DEFAULT_PRECISION) -> str:
    buf = io.StringIO()
    for key, value in table.metadata.items():
        if "\n" in str(value) or "=" in str(key):
            raise ValueError(f"metadata entry {key!r} cannot be written on one line")
        buf.write(f"# {key}={value}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        if len(row) != len(table.columns):
            raise ValueError(f"row has {len(row)} fields, header has {len(table.columns)}")
        buf.write(",".join(format_float(v, precision) for v in row) + "\n")
    return buf.getvalue()


def loads(text: str) -> Table:
    metadata: dict[str, str] = {}
    columns = None
    rows = []
    for line in text.splitlines():
        if columns is None and line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            metadata[key] = value
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    if columns is None:
        raise ValueError("no header line found")
    return Table(columns, rows, metadata)


def read_table(path) -> Table:
    with open(path, encoding="utf-8", newline="") as fh:
        return loads(fh.read())


def write_text_atomic(path, text: str):
    """Write via a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path, table: Table, precision: int = DEFAULT_PRECISION):
    write_text_atomic(path, dumps(table, precision))


def result_table(result) -> Table:
    """Table view of a ``SweepResult``."""
    return Table(list(result.columns), [list(map(float, r)) for r in result.data], dict(result.metadata))
