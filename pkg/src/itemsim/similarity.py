"""Item similarity matrices from features, edit distances, and performance.

Entries may be missing (NaN) when the data is insufficient: constant rows
under Pearson, zero-norm rows under cosine, item pairs with too few common
learners. Matrices are exactly symmetric because every unordered pair is
computed once and mirrored.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, PerformanceRecord, select_solutions
from .editdist import NwScoring, levenshtein, needleman_wunsch, tree_edit_distance
from .errors import ItemsimError
from .features import FeatureMatrix
from .tree import action_sequence, canonize, node_count

log = logging.getLogger("itemsim.similarity")

METRICS = ("pearson", "cosine", "euclidean")

EDIT_KINDS = ("levenshtein", "ted", "nw")


@dataclass(frozen=True)
class SimilarityMatrix:
    """Square symmetric matrix over item ids; NaN marks missing entries.
    The diagonal always holds the measure's self-similarity."""

    item_ids: tuple[str, ...]
    values: np.ndarray
    measure_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        n = len(self.item_ids)
        if self.values.shape != (n, n):
            raise ItemsimError(f"similarity matrix shape {self.values.shape} for {n} items")
        if len(set(self.item_ids)) != n:
            raise ItemsimError("duplicate item ids")
        missing = np.isnan(self.values)
        if not np.array_equal(missing, missing.T):
            raise ItemsimError("missing entries must be symmetric")
        if not np.array_equal(self.values[~missing], self.values.T[~missing]):
            raise ItemsimError("similarity matrix must be exactly symmetric")
        if n and np.isnan(self.values.diagonal()).any():
            raise ItemsimError("diagonal entries must be defined")

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)


def _mirror_upper(values: np.ndarray) -> np.ndarray:
    """Copy the upper triangle onto the lower one so symmetry is exact."""
    out = values.copy()
    i, j = np.tril_indices(len(values), k=-1)
    out[i, j] = out[j, i]
    return out


def similarity_from_features(
    m: FeatureMatrix, metric: str = "pearson", measure_name: str | None = None
) -> SimilarityMatrix:
    """Row-vector similarity under pearson, cosine, or subtracted euclidean
    (S = -distance). Degenerate rows (constant for pearson, zero for cosine)
    yield missing entries against every other item."""
    if metric not in METRICS:
        raise ItemsimError(f"unknown metric {metric!r}")
    if m.n_items == 0 or m.n_features == 0:
        raise ItemsimError("empty feature matrix")
    v = m.values
    if metric == "euclidean":
        sq = (v * v).sum(axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (v @ v.T)
        s = -np.sqrt(np.maximum(d2, 0.0))
        s = _mirror_upper(s)
        np.fill_diagonal(s, 0.0)
    else:
        rows = v - v.mean(axis=1, keepdims=True) if metric == "pearson" else v
        norms = np.linalg.norm(rows, axis=1)
        valid = norms > 0
        safe = np.where(valid, norms, 1.0)
        unit = rows / safe[:, None]
        s = np.clip(unit @ unit.T, -1.0, 1.0)
        s = _mirror_upper(s)
        s[~valid, :] = np.nan
        s[:, ~valid] = np.nan
        np.fill_diagonal(s, 1.0)
    return SimilarityMatrix(
        item_ids=m.item_ids, values=s, measure_name=measure_name or metric
    )


def restrict(s: SimilarityMatrix, item_ids: tuple[str, ...]) -> SimilarityMatrix:
    """Keep only the given items, in the given order."""
    index = {item_id: i for i, item_id in enumerate(s.item_ids)}
    missing = [i for i in item_ids if i not in index]
    if missing:
        raise ItemsimError(f"items not in similarity matrix: {', '.join(missing)}")
    rows = [index[i] for i in item_ids]
    return SimilarityMatrix(
        item_ids=tuple(item_ids),
        values=s.values[np.ix_(rows, rows)],
        measure_name=s.measure_name,
    )


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    nx = math.sqrt(float(xc @ xc))
    ny = math.sqrt(float(yc @ yc))
    if nx == 0.0 or ny == 0.0:
        return math.nan
    return max(-1.0, min(1.0, float(xc @ yc) / (nx * ny)))


def edit_similarity(
    corpus: Corpus,
    kind: str = "ted",
    selector: str = "sample",
    aggregation: str = "min",
    nw_scoring: NwScoring = NwScoring(),
    unroll_cap: int = 100,
    total_cap: int = 10000,
) -> SimilarityMatrix:
    """Solution-based similarity. Distances are computed between every
    cross-pair of the items' selected solutions and aggregated: min keeps
    the closest pair (largest score for alignment), average takes the mean
    of the per-pair similarities.

    Conversion per pair: levenshtein and ted use S = 1 - d/(len(a)+len(b))
    over token and node counts; nw uses S = score/max(len(a), len(b), 1)
    over action sequences."""
    if kind not in EDIT_KINDS:
        raise ItemsimError(f"unknown edit-distance kind {kind!r}")
    if aggregation not in ("min", "average"):
        raise ItemsimError(f"unknown aggregation {aggregation!r}")
    chosen = [(it.id, select_solutions(it, selector)) for it in corpus.items]
    empty = [item_id for item_id, sols in chosen if not sols]
    if empty:
        raise ItemsimError(
            f"no solution under selector {selector!r} for items: {', '.join(empty)}"
        )

    if kind == "levenshtein":
        prepared = [[canonize(s.ast) for s in sols] for _, sols in chosen]
        lengths = [[len(seq) for seq in seqs] for seqs in prepared]
    elif kind == "ted":
        prepared = [[s.ast for s in sols] for _, sols in chosen]
        lengths = [[node_count(t) for t in trees] for trees in prepared]
    else:
        prepared = [
            [action_sequence(s.ast, unroll_cap=unroll_cap, total_cap=total_cap) for s in sols]
            for _, sols in chosen
        ]
        lengths = [[len(seq) for seq in seqs] for seqs in prepared]

    def raw(a, b) -> float:
        if kind == "levenshtein":
            return levenshtein(a, b)
        if kind == "ted":
            return tree_edit_distance(a, b)
        return needleman_wunsch(a, b, nw_scoring)

    def convert(value: float, la: int, lb: int) -> float:
        if kind == "nw":
            return value / max(la, lb, 1)
        return 1.0 - value / max(la + lb, 1)

    def cell(i: int, j: int) -> float:
        pairs = [
            (raw(a, b), lengths[i][ai], lengths[j][bi])
            for ai, a in enumerate(prepared[i])
            for bi, b in enumerate(prepared[j])
        ]
        if aggregation == "min":
            if kind == "nw":
                best = max(pairs, key=lambda p: p[0])
            else:
                best = min(pairs, key=lambda p: p[0])
            return convert(*best)
        return float(np.mean([convert(*p) for p in pairs]))

    n = len(chosen)
    values = np.zeros((n, n))
    for i in range(n):
        # diagonal pairs each solution with itself: distance 0, so 1 for
        # levenshtein/ted; alignment self-score for nw
        self_pairs = [
            (raw(a, a), lengths[i][ai], lengths[i][ai]) for ai, a in enumerate(prepared[i])
        ]
        if aggregation == "min":
            best = max(self_pairs, key=lambda p: p[0]) if kind == "nw" else min(
                self_pairs, key=lambda p: p[0]
            )
            values[i, i] = convert(*best)
        else:
            values[i, i] = float(np.mean([convert(*p) for p in self_pairs]))
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = cell(i, j)
    name = kind if selector == "sample" and aggregation == "min" else f"{kind}/{selector}/{aggregation}"
    return SimilarityMatrix(
        item_ids=tuple(item_id for item_id, _ in chosen), values=values, measure_name=name
    )


def performance_similarity(
    records: list[PerformanceRecord],
    measure: str = "log_time",
    min_overlap: int = 10,
    item_ids: tuple[str, ...] | None = None,
) -> SimilarityMatrix:
    """Pairwise Pearson correlation of learner performance over the learners
    who attempted both items; pairs with fewer than min_overlap common
    learners stay missing. measure: log_time (natural log of time_seconds)
    or success (0/1)."""
    if measure not in ("log_time", "success"):
        raise ItemsimError(f"unknown performance measure {measure!r}")
    if min_overlap < 1:
        raise ItemsimError("min_overlap must be positive")
    if item_ids is None:
        item_ids = tuple(sorted({r.item_id for r in records}))
    item_index = {item_id: j for j, item_id in enumerate(item_ids)}
    learner_ids = sorted({r.learner_id for r in records})
    learner_index = {learner_id: i for i, learner_id in enumerate(learner_ids)}

    table = np.full((len(learner_ids), len(item_ids)), np.nan)
    for r in records:
        j = item_index.get(r.item_id)
        if j is None:
            continue
        i = learner_index[r.learner_id]
        if np.isnan(table[i, j]):  # keep-first on duplicates
            table[i, j] = math.log(r.time_seconds) if measure == "log_time" else float(r.success)

    have = ~np.isnan(table)
    n = len(item_ids)
    values = np.full((n, n), np.nan)
    np.fill_diagonal(values, 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            common = have[:, i] & have[:, j]
            if int(common.sum()) < min_overlap:
                continue
            values[i, j] = values[j, i] = _pearson(table[common, i], table[common, j])
    return SimilarityMatrix(item_ids=item_ids, values=values, measure_name="perfcorr")
