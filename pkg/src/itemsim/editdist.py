"""Edit distances over token sequences and ordered trees.

levenshtein: unit-cost insert/delete/substitute over tokens.
tree_edit_distance: Zhang-Shasha ordered-tree edit distance, unit costs
(relabel free for equal labels).
needleman_wunsch: global alignment score, higher is more similar.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite
from typing import Sequence

import numpy as np

from .errors import ItemsimError
from .tree import AstNode


def levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    """Minimal number of token insertions, deletions, and substitutions
    turning a into b."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[len(b)]


def _postorder(root: AstNode) -> tuple[list[str], list[int]]:
    """Postorder labels plus, per node, the postorder index of its leftmost
    leaf descendant."""
    labels: list[str] = []
    leftmost: list[int] = []

    def walk(node: AstNode) -> int:
        first = None
        for child in node.children:
            idx = walk(child)
            if first is None:
                first = idx
        labels.append(node.label)
        leftmost.append(first if first is not None else len(labels) - 1)
        return leftmost[-1]

    walk(root)
    return labels, leftmost


def _keyroots(leftmost: list[int]) -> list[int]:
    # highest postorder index per distinct leftmost-leaf value
    highest: dict[int, int] = {}
    for i, l in enumerate(leftmost):
        highest[l] = i
    return sorted(highest.values())


def tree_edit_distance(t1: AstNode, t2: AstNode) -> int:
    """Zhang-Shasha distance between ordered labeled trees with unit costs:
    insert 1, delete 1, relabel 1 unless labels are equal."""
    la, lma = _postorder(t1)
    lb, lmb = _postorder(t2)
    m, n = len(la), len(lb)
    td = np.zeros((m, n), dtype=np.int64)

    for i in _keyroots(lma):
        for j in _keyroots(lmb):
            li, lj = lma[i], lmb[j]
            rows, cols = i - li + 2, j - lj + 2
            fd = np.zeros((rows, cols), dtype=np.int64)
            fd[1:, 0] = np.arange(1, rows)
            fd[0, 1:] = np.arange(1, cols)
            for di in range(1, rows):
                x = li + di - 1
                for dj in range(1, cols):
                    y = lj + dj - 1
                    if lma[x] == li and lmb[y] == lj:
                        fd[di, dj] = min(
                            fd[di - 1, dj] + 1,
                            fd[di, dj - 1] + 1,
                            fd[di - 1, dj - 1] + (la[x] != lb[y]),
                        )
                        td[x, y] = fd[di, dj]
                    else:
                        fd[di, dj] = min(
                            fd[di - 1, dj] + 1,
                            fd[di, dj - 1] + 1,
                            fd[lma[x] - li, lmb[y] - lj] + td[x, y],
                        )
    return int(td[m - 1, n - 1])


@dataclass(frozen=True)
class NwScoring:
    match: float = 1.0
    mismatch: float = -1.0
    gap: float = -1.0

    def __post_init__(self):
        for v in (self.match, self.mismatch, self.gap):
            if not isfinite(v):
                raise ItemsimError("alignment scores must be finite")


def needleman_wunsch(a: Sequence[str], b: Sequence[str], s: NwScoring = NwScoring()) -> float:
    """Optimal global alignment score of two sequences under s."""
    prev = [j * s.gap for j in range(len(b) + 1)]
    for i, x in enumerate(a, start=1):
        cur = [i * s.gap]
        for j, y in enumerate(b, start=1):
            cur.append(
                max(
                    prev[j - 1] + (s.match if x == y else s.mismatch),
                    prev[j] + s.gap,
                    cur[j - 1] + s.gap,
                )
            )
        prev = cur
    return float(prev[len(b)])
