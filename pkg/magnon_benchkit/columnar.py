"""Delimiter-separated columnar text files.

Layout::

    # freq(GHz), power(1), phase(rad)
    # optional comment lines
    7.865, 0.9913, -3.0117
    ...

The first line is the mandatory header naming each column and its unit.
Numbers are written with ``format(value, ".12g")`` so files do not depend on
the locale and identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import pathlib
import re
import sys
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

__all__ = ["DataFormatError", "ColumnarOutput", "read_columnar", "format_value"]

_HEADER_ITEM = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_|^]*)\s*\(([^()]*)\)\s*$")


class DataFormatError(ValueError):
    """Malformed data file; the message names the offending line."""

    def __init__(self, source: str, line: int, message: str) -> None:
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


def format_value(value: float) -> str:
    return format(float(value), ".12g")


@dataclass(frozen=True, eq=False)
class ColumnarOutput:
    columns: tuple[tuple[str, str], ...]
    rows: np.ndarray
    comments: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, len(self.columns))
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise ValueError("rows must be rectangular with one value per column")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "columns", tuple((str(n), str(u)) for n, u in self.columns))

    @classmethod
    def from_columns(
        cls,
        columns: Sequence[tuple[str, str]],
        data: Sequence[Sequence[float]],
        comments: Sequence[str] = (),
    ) -> ColumnarOutput:
        stacked = np.column_stack([np.asarray(c, dtype=float) for c in data])
        return cls(tuple(columns), stacked, tuple(comments))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.columns)

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.names.index(name)
        except ValueError:
            raise KeyError(name) from None
        return self.rows[:, idx]

    def header(self) -> str:
        return "# " + ", ".join(f"{n}({u})" for n, u in self.columns)

    def to_text(self) -> str:
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue()

    def write(self, target=None) -> pathlib.Path | None:
        """Write to a path, an open text stream, or stdout when ``target`` is None or "-"."""
        if target is None or str(target) == "-":
            self._write_stream(sys.stdout)
            return None
        if hasattr(target, "write"):
            self._write_stream(target)
            return None
        path = pathlib.Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            self._write_stream(fh)
        return path

    def _write_stream(self, fh) -> None:
        fh.write(self.header() + "\n")
        for line in self.comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])


def _parse_header(line: str, source: str) -> tuple[tuple[str, str], ...]:
    body = line.lstrip()[1:]
    items = next(csv.reader([body], skipinitialspace=True))
    columns = []
    for item in items:
        m = _HEADER_ITEM.match(item)
        if m is None:
            raise DataFormatError(source, 1, f"header entry {item.strip()!r} is not name(unit)")
        columns.append((m.group(1), m.group(2).strip()))
    if not columns:
        raise DataFormatError(source, 1, "header names no columns")
    return tuple(columns)


def read_columnar(path: str | pathlib.Path) -> ColumnarOutput:
    source = str(path)
    try:
        text = pathlib.Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(source, 0, f"cannot read file: {exc}") from exc
    lines = text.splitlines()
    if not lines or not lines[0].lstrip().startswith("#"):
        raise DataFormatError(source, 1, "missing header line '# name(unit), ...'")
    columns = _parse_header(lines[0], source)
    rows: list[list[float]] = []
    comments: list[str] = []
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comments.append(stripped[1:].strip())
            continue
        fields = next(csv.reader([stripped], skipinitialspace=True))
        if len(fields) != len(columns):
            raise DataFormatError(
                source, lineno, f"expected {len(columns)} columns, found {len(fields)}"
            )
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            raise DataFormatError(source, lineno, f"non-numeric value in {stripped!r}") from None
    if not rows:
        raise DataFormatError(source, len(lines), "file holds no data rows")
    return ColumnarOutput(columns, np.array(rows, dtype=float), tuple(comments))
