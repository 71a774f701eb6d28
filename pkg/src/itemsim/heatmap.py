"""Hand-rolled SVG heatmaps for square matrices, byte-deterministic.

One rect per cell, linear color ramp from the matrix minimum to maximum,
grey cells for missing entries, optional hierarchical row/column ordering.
"""

from __future__ import annotations

import math

import numpy as np

from .analysis import hierarchical_order
from .errors import ItemsimError
from .similarity import SimilarityMatrix

CELL = 14
FONT = 10
PAD = 4

_LOW = (247, 251, 255)
_HIGH = (8, 48, 107)
_MISSING = "#bdbdbd"


def _ramp(t: float) -> str:
    channels = (round(lo + t * (hi - lo)) for lo, hi in zip(_LOW, _HIGH))
    return "#" + "".join(f"{c:02x}" for c in channels)


def heatmap_svg(ids: tuple[str, ...], values: np.ndarray, ordering: str = "none") -> str:
    """Render a square matrix as SVG. ordering=hierarchical reorders rows
    and columns identically by average-linkage leaf order."""
    values = np.asarray(values, dtype=np.float64)
    n = len(ids)
    if values.shape != (n, n):
        raise ItemsimError(f"heatmap needs a square matrix, got shape {values.shape} for {n} ids")
    if ordering == "hierarchical":
        sym = SimilarityMatrix(item_ids=ids, values=_symmetrized(values))
        perm = hierarchical_order(sym)
    elif ordering == "none":
        perm = list(range(n))
    else:
        raise ItemsimError(f"unknown ordering {ordering!r}")
    ids = tuple(ids[i] for i in perm)
    values = values[np.ix_(perm, perm)]

    defined = values[~np.isnan(values)]
    lo = float(defined.min()) if defined.size else 0.0
    hi = float(defined.max()) if defined.size else 0.0
    span = hi - lo

    label_w = PAD * 2 + max((len(i) for i in ids), default=0) * (FONT * 3 // 5)
    width = label_w + n * CELL + PAD
    height = label_w + n * CELL + PAD
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<style>text{{font-family:monospace;font-size:{FONT}px;fill:#000}}</style>',
    ]
    for i, item_id in enumerate(ids):
        y = label_w + i * CELL + CELL // 2 + FONT // 2
        out.append(f'<text x="{PAD}" y="{y}">{_escape(item_id)}</text>')
        x = label_w + i * CELL + CELL // 2
        out.append(
            f'<text x="{x}" y="{label_w - PAD}" transform="rotate(-90 {x} {label_w - PAD})">'
            f"{_escape(item_id)}</text>"
        )
    for i in range(n):
        for j in range(n):
            v = values[i, j]
            if math.isnan(v):
                fill = _MISSING
            elif span == 0:
                fill = _ramp(0.5)
            else:
                fill = _ramp((v - lo) / span)
            x = label_w + j * CELL
            y = label_w + i * CELL
            out.append(f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _symmetrized(values: np.ndarray) -> np.ndarray:
    """Hierarchical ordering needs a full symmetric matrix; average the two
    triangles so mildly asymmetric inputs still order sensibly."""
    if np.isnan(values).any():
        raise ItemsimError("hierarchical ordering needs a fully defined matrix")
    return (values + values.T) / 2.0


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
