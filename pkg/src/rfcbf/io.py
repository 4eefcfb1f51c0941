"""Delimited-text dataset loading."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .preprocess import RawDataset

DELIMITERS = ",;\t"


class DatasetFormatError(ValueError):
    pass


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _detect_delimiter(header_line: str) -> str:
    counts = {d: header_line.count(d) for d in DELIMITERS}
    best = max(counts, key=lambda d: (counts[d], -DELIMITERS.index(d)))
    return best if counts[best] else ","


def _class_position(spec, header: list[str]) -> int:
    if spec is None or spec == "last":
        return len(header) - 1
    if spec == "first":
        return 0
    if isinstance(spec, int) or (isinstance(spec, str) and spec.lstrip("-").isdigit()):
        pos = int(spec)
        if not -len(header) <= pos < len(header):
            raise DatasetFormatError(f"class column index {pos} out of range")
        return pos % len(header)
    if spec in header:
        return header.index(spec)
    raise DatasetFormatError(f"class column {spec!r} not found in header {header}")


def load_dataset(path, class_column="last", missing_token: str = "?",
                 delimiter: str | None = None) -> RawDataset:
    """Read a header-row delimited file into a :class:`RawDataset`.

    ``class_column`` is ``"last"``, ``"first"``, a column name or a 0-based
    index. Class values are mapped to 0, 1, ... in order of first appearance.
    Cells equal to ``missing_token`` (or empty) become NaN.
    """
    path = Path(path)
    text = path.read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DatasetFormatError(f"{path}: empty file")
    delim = delimiter or _detect_delimiter(lines[0])
    rows = [[c.strip() for c in r] for r in csv.reader(lines, delimiter=delim)]
    header, body = rows[0], rows[1:]
    if all(_is_number(c) for c in header):
        raise DatasetFormatError(f"{path}: first row looks like data, a header row is required")
    if len(set(header)) != len(header):
        raise DatasetFormatError(f"{path}: duplicate column names in header")
    if not body:
        raise DatasetFormatError(f"{path}: no data rows")
    if len(header) < 2:
        raise DatasetFormatError(f"{path}: need at least one feature and a class column")

    cpos = _class_position(class_column, header)
    feat_pos = [j for j in range(len(header)) if j != cpos]
    X = np.empty((len(body), len(feat_pos)))
    classes: dict[str, int] = {}
    labels = np.empty(len(body), dtype=np.intp)
    for i, row in enumerate(body):
        line_no = i + 2
        if len(row) != len(header):
            raise DatasetFormatError(
                f"{path}:{line_no}: expected {len(header)} cells, found {len(row)}")
        labels[i] = classes.setdefault(row[cpos], len(classes))
        for out_j, j in enumerate(feat_pos):
            cell = row[j]
            if cell == missing_token or cell == "":
                X[i, out_j] = np.nan
                continue
            try:
                X[i, out_j] = float(cell)
            except ValueError:
                raise DatasetFormatError(
                    f"{path}:{line_no}: column {header[j]!r} has non-numeric value {cell!r}"
                ) from None
    return RawDataset(X, labels, tuple(header[j] for j in feat_pos), len(classes),
                      tuple(classes))
