"""Agreement between similarity measures, split-half stability, clustering.

Level 2 compares similarity matrices pairwise (Pearson over flattened pairs,
or overlap of per-item top-n neighbor sets). Level 3 compares the resulting
agreement matrices. Clustering quality against manual level labels uses
k-means and the Rand Index.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .corpus import PerformanceRecord
from .errors import ItemsimError
from .similarity import SimilarityMatrix, performance_similarity

log = logging.getLogger("itemsim.analysis")


@dataclass(frozen=True)
class AgreementMatrix:
    """Square symmetric matrix of pairwise agreement between named
    similarity measures. method: "correlation" or "top:<n>"."""

    measure_names: tuple[str, ...]
    values: np.ndarray
    method: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        n = len(self.measure_names)
        if self.values.shape != (n, n):
            raise ItemsimError(f"agreement matrix shape {self.values.shape} for {n} measures")
        if not np.array_equal(self.values, self.values.T):
            raise ItemsimError("agreement matrix must be symmetric")
        if n and not np.all(self.values.diagonal() == 1.0):
            raise ItemsimError("agreement diagonal must be exactly 1")
        _parse_method(self.method)


def _parse_method(method: str) -> tuple[str, int | None]:
    if method == "correlation":
        return "correlation", None
    if method.startswith("top:"):
        try:
            n = int(method[4:])
        except ValueError:
            n = 0
        if n >= 1:
            return "top", n
    raise ItemsimError(f"unknown agreement method {method!r}; use correlation or top:<n>")


@dataclass(frozen=True)
class Partition:
    item_ids: tuple[str, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.item_ids):
            raise ItemsimError("one label per item required")
        if any(not isinstance(l, int) or l < 0 for l in self.labels):
            raise ItemsimError("labels must be non-negative integers")

    @property
    def n_clusters(self) -> int:
        return max(self.labels) + 1 if self.labels else 0


def flatten_pairs(s: SimilarityMatrix) -> list[tuple[tuple[str, str], float]]:
    """Strict upper triangle in row-major order, missing entries skipped."""
    out = []
    for i in range(s.n_items):
        for j in range(i + 1, s.n_items):
            v = s.values[i, j]
            if not np.isnan(v):
                out.append(((s.item_ids[i], s.item_ids[j]), float(v)))
    return out


def _common_pair_values(s1: SimilarityMatrix, s2: SimilarityMatrix):
    if s1.item_ids != s2.item_ids:
        raise ItemsimError("similarity matrices cover different item sets")
    i, j = np.triu_indices(s1.n_items, k=1)
    x = s1.values[i, j]
    y = s2.values[i, j]
    keep = ~(np.isnan(x) | np.isnan(y))
    return x[keep], y[keep]


def agreement_correlation(s1: SimilarityMatrix, s2: SimilarityMatrix) -> float:
    """Pearson correlation over item pairs defined in both matrices."""
    x, y = _common_pair_values(s1, s2)
    if len(x) < 2:
        raise ItemsimError(f"only {len(x)} common defined pairs; need at least 2")
    xc = x - x.mean()
    yc = y - y.mean()
    nx = math.sqrt(float(xc @ xc))
    ny = math.sqrt(float(yc @ yc))
    if nx == 0.0 or ny == 0.0:
        raise ItemsimError("zero variance over common pairs")
    return max(-1.0, min(1.0, float(xc @ yc) / (nx * ny)))


def _top_neighbors(s: SimilarityMatrix, i: int, n: int) -> set[str] | None:
    """Ids of the n most similar other items; ties by ascending item id.
    None when fewer than n neighbors are defined."""
    candidates = [
        (-s.values[i, j], s.item_ids[j])
        for j in range(s.n_items)
        if j != i and not np.isnan(s.values[i, j])
    ]
    if len(candidates) < n:
        return None
    candidates.sort()
    return {item_id for _, item_id in candidates[:n]}


def agreement_topn(s1: SimilarityMatrix, s2: SimilarityMatrix, n: int) -> float:
    """Mean normalized overlap of per-item top-n neighbor sets. Items with
    fewer than n defined neighbors in either matrix are skipped."""
    if n < 1:
        raise ItemsimError("n must be positive")
    if s1.item_ids != s2.item_ids:
        raise ItemsimError("similarity matrices cover different item sets")
    overlaps = []
    skipped = []
    for i in range(s1.n_items):
        top1 = _top_neighbors(s1, i, n)
        top2 = _top_neighbors(s2, i, n)
        if top1 is None or top2 is None:
            skipped.append(s1.item_ids[i])
            continue
        overlaps.append(len(top1 & top2) / n)
    if skipped:
        log.warning("top-%d agreement: skipped %d items with too few defined neighbors: %s",
                    n, len(skipped), ", ".join(skipped))
    if not overlaps:
        raise ItemsimError(f"no item has {n} defined neighbors in both matrices")
    return float(np.mean(overlaps))


def agreement_matrix(measures: list[SimilarityMatrix], method: str = "correlation") -> AgreementMatrix:
    """Pairwise agreement between named similarity matrices."""
    kind, n = _parse_method(method)
    if len(measures) < 2:
        raise ItemsimError("need at least 2 measures")
    names = tuple(m.measure_name for m in measures)
    if any(not name for name in names):
        raise ItemsimError("every measure needs a name")
    if len(set(names)) != len(names):
        raise ItemsimError("duplicate measure names")
    k = len(measures)
    values = np.eye(k)
    for a in range(k):
        for b in range(a + 1, k):
            if kind == "correlation":
                v = agreement_correlation(measures[a], measures[b])
            else:
                v = agreement_topn(measures[a], measures[b], n)
            values[a, b] = values[b, a] = v
    return AgreementMatrix(measure_names=names, values=values, method=method)


def meta_agreement(a1: AgreementMatrix, a2: AgreementMatrix) -> float:
    """Pearson correlation between two agreement matrices' strict upper
    triangles (level 3 of the evaluation)."""
    if a1.measure_names != a2.measure_names:
        raise ItemsimError("agreement matrices cover different measure sets")
    i, j = np.triu_indices(len(a1.measure_names), k=1)
    x = a1.values[i, j]
    y = a2.values[i, j]
    if len(x) < 2:
        raise ItemsimError(f"only {len(x)} off-diagonal entries; need at least 2")
    xc = x - x.mean()
    yc = y - y.mean()
    nx = math.sqrt(float(xc @ xc))
    ny = math.sqrt(float(yc @ yc))
    if nx == 0.0 or ny == 0.0:
        raise ItemsimError("zero variance over agreement entries")
    return max(-1.0, min(1.0, float(xc @ yc) / (nx * ny)))


def split_half_stability(
    records: list[PerformanceRecord],
    measure: str = "log_time",
    min_overlap: int = 10,
    seed: int = 0,
) -> float:
    """Shuffle learners with a seeded PRNG, split them into two halves
    (first half rounded up), compute performance similarity per half over
    the full item set, and return the agreement correlation of the halves."""
    learners = sorted({r.learner_id for r in records})
    if len(learners) < 2:
        raise ItemsimError("need at least 2 learners")
    item_ids = tuple(sorted({r.item_id for r in records}))
    rng = np.random.default_rng(seed)
    order = [learners[i] for i in rng.permutation(len(learners))]
    cut = (len(order) + 1) // 2
    first = set(order[:cut])
    half_a = [r for r in records if r.learner_id in first]
    half_b = [r for r in records if r.learner_id not in first]
    s1 = performance_similarity(half_a, measure=measure, min_overlap=min_overlap, item_ids=item_ids)
    s2 = performance_similarity(half_b, measure=measure, min_overlap=min_overlap, item_ids=item_ids)
    return agreement_correlation(s1, s2)


def _wcss(x: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> float:
    return float(((x - centers[labels]) ** 2).sum())


def _nearest(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def _kmeans_once(x: np.ndarray, k: int, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    n = len(x)
    # k-means++ seeding
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = int(rng.integers(n))
        centers[c] = x[idx]
        d2 = np.minimum(d2, ((x - centers[c]) ** 2).sum(axis=1))

    labels = _nearest(x, centers)
    prev_wcss = _wcss(x, centers, labels)
    for _ in range(300):
        new_centers = centers.copy()
        for c in range(k):
            mask = labels == c
            if mask.any():
                new_centers[c] = x[mask].mean(axis=0)
            else:
                # repopulate an emptied cluster with the point farthest
                # from its current center
                dist = ((x - new_centers[labels]) ** 2).sum(axis=1)
                far = int(dist.argmax())
                new_centers[c] = x[far]
                labels = labels.copy()
                labels[far] = c
        shift = float(np.abs(new_centers - centers).max())
        centers = new_centers
        labels = _nearest(x, centers)
        wcss = _wcss(x, centers, labels)
        assert wcss <= prev_wcss + 1e-9 * max(1.0, prev_wcss), "k-means objective increased"
        prev_wcss = wcss
        if shift < 1e-9:
            break
    return labels, prev_wcss


def kmeans(s: SimilarityMatrix, k: int, seed: int = 0, restarts: int = 1) -> Partition:
    """Cluster items by k-means over similarity-matrix rows using k-means++
    seeding and Lloyd iterations; returns the best of `restarts` runs by
    within-cluster sum of squares."""
    if s.missing_mask().any():
        raise ItemsimError("similarity matrix has missing entries")
    if not 1 <= k <= s.n_items:
        raise ItemsimError(f"k={k} out of range for {s.n_items} items")
    if restarts < 1:
        raise ItemsimError("restarts must be positive")
    rng = np.random.default_rng(seed)
    best_labels, best_wcss = None, math.inf
    for _ in range(restarts):
        labels, wcss = _kmeans_once(s.values, k, rng)
        if wcss < best_wcss:
            best_labels, best_wcss = labels, wcss
    return Partition(item_ids=s.item_ids, labels=tuple(int(l) for l in best_labels))


def rand_index(p1: Partition, p2: Partition) -> float:
    """Fraction of item pairs co-clustered in both partitions or separated
    in both."""
    if p1.item_ids != p2.item_ids:
        raise ItemsimError("partitions cover different item sets")
    n = len(p1.item_ids)
    if n < 2:
        raise ItemsimError("need at least 2 items")
    a = np.asarray(p1.labels)
    b = np.asarray(p2.labels)
    same_a = a[:, None] == a[None, :]
    same_b = b[:, None] == b[None, :]
    i, j = np.triu_indices(n, k=1)
    return float((same_a[i, j] == same_b[i, j]).mean())


def cluster_eval(
    s: SimilarityMatrix, manual: Partition, k: int, runs: int = 10, seed: int = 0
) -> float:
    """Mean Rand Index between manual labels and `runs` k-means runs seeded
    seed, seed+1, ..."""
    if runs < 1:
        raise ItemsimError("runs must be positive")
    if manual.item_ids != s.item_ids:
        raise ItemsimError("manual partition covers a different item set")
    scores = [
        rand_index(kmeans(s, k, seed=seed + r, restarts=1), manual) for r in range(runs)
    ]
    return float(np.mean(scores))


def hierarchical_order(s: SimilarityMatrix) -> list[int]:
    """Leaf order of an agglomerative average-linkage dendrogram over the
    dissimilarity max(S) - S. Merge ties pick the smallest index pair."""
    if s.missing_mask().any():
        raise ItemsimError("similarity matrix has missing entries")
    n = s.n_items
    if n == 0:
        return []
    d = float(s.values.max()) - s.values
    leaves: list[list[int]] = [[i] for i in range(n)]
    sizes = [1.0] * n
    dist = [[float(d[i, j]) for j in range(n)] for i in range(n)]
    while len(leaves) > 1:
        best = None
        for i in range(len(leaves)):
            for j in range(i + 1, len(leaves)):
                key = (dist[i][j], i, j)
                if best is None or key < best:
                    best = key
        _, bi, bj = best
        merged_dist = [
            (sizes[bi] * dist[bi][t] + sizes[bj] * dist[bj][t]) / (sizes[bi] + sizes[bj])
            for t in range(len(leaves))
        ]
        leaves[bi] = leaves[bi] + leaves[bj]
        sizes[bi] += sizes[bj]
        for t in range(len(leaves)):
            dist[bi][t] = dist[t][bi] = merged_dist[t]
        dist[bi][bi] = 0.0
        del leaves[bj], sizes[bj], dist[bj]
        for row in dist:
            del row[bj]
    return leaves[0]
