"""Deterministic CSV serialization for all matrix and vector artifacts.

All files are UTF-8 with LF line endings and no trailing whitespace. Values
use 9 significant digits; missing entries serialize as empty fields.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .analysis import AgreementMatrix, Partition
from .errors import ItemsimError
from .features import FeatureMatrix
from .projection import Embedding
from .similarity import SimilarityMatrix


def format_value(v: float) -> str:
    """9-significant-digit decimal; NaN becomes the empty field; negative
    zero normalizes to 0."""
    if math.isnan(v):
        return ""
    text = f"{v:.9g}"
    return text[1:] if text.startswith("-0") and float(text) == 0 else text


def _write_rows(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def feature_csv(m: FeatureMatrix) -> str:
    rows = [["item_id", *m.full_names]]
    for i, item_id in enumerate(m.item_ids):
        rows.append([item_id, *(format_value(v) for v in m.values[i])])
    return _write_rows(rows)


def similarity_csv(s: SimilarityMatrix) -> str:
    rows = [["item_id", *s.item_ids]]
    for i, item_id in enumerate(s.item_ids):
        rows.append([item_id, *(format_value(v) for v in s.values[i])])
    return _write_rows(rows)


def agreement_csv(a: AgreementMatrix) -> str:
    rows = [["measure", *a.measure_names]]
    for i, name in enumerate(a.measure_names):
        rows.append([name, *(format_value(v) for v in a.values[i])])
    return _write_rows(rows)


def partition_csv(p: Partition) -> str:
    rows = [["item_id", "label"]]
    for item_id, label in zip(p.item_ids, p.labels):
        rows.append([item_id, str(label)])
    return _write_rows(rows)


def embedding_csv(e: Embedding) -> str:
    head = ""
    if e.explained_variance is not None:
        head = "# explained_variance: " + ",".join(
            format_value(v) for v in e.explained_variance
        ) + "\n"
    rows = [["item_id", *(f"x{d + 1}" for d in range(e.dims))]]
    for i, item_id in enumerate(e.item_ids):
        rows.append([item_id, *(format_value(v) for v in e.coordinates[i])])
    return head + _write_rows(rows)


def scalar_text(v: float) -> str:
    return format_value(v) + "\n"


def read_square_csv(text: str, source: str = "matrix") -> tuple[tuple[str, ...], np.ndarray]:
    """Parse a square matrix CSV (similarity or agreement shaped): header
    holds the ids, each row starts with its id, empty fields are missing."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ItemsimError(f"{source}: empty file") from None
    if len(header) < 2:
        raise ItemsimError(f"{source}: expected an id column plus one column per entry")
    ids = tuple(header[1:])
    n = len(ids)
    values = np.full((n, n), np.nan)
    row_ids = []
    for row in reader:
        if not row:
            continue
        if len(row) != n + 1:
            raise ItemsimError(f"{source}: row {row[0]!r} has {len(row) - 1} values, expected {n}")
        row_ids.append(row[0])
        if len(row_ids) > n:
            raise ItemsimError(f"{source}: more rows than columns; matrix must be square")
        for j, cell in enumerate(row[1:]):
            if cell != "":
                try:
                    values[len(row_ids) - 1, j] = float(cell)
                except ValueError:
                    raise ItemsimError(f"{source}: non-numeric cell {cell!r}") from None
    if tuple(row_ids) != ids:
        raise ItemsimError(f"{source}: row ids must match column ids in order")
    return ids, values


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="")
