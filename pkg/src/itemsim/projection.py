"""Deterministic low-dimensional projections: PCA over feature matrices and
classical (Torgerson) metric MDS over similarity matrices."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ItemsimError
from .features import FeatureMatrix
from .similarity import SimilarityMatrix

log = logging.getLogger("itemsim.projection")


@dataclass(frozen=True)
class Embedding:
    """Coordinates per item; explained_variance holds per-dimension shares
    of total variance (PCA only)."""

    item_ids: tuple[str, ...]
    coordinates: np.ndarray
    explained_variance: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "coordinates", np.asarray(self.coordinates, dtype=np.float64))
        if self.coordinates.ndim != 2 or self.coordinates.shape[0] != len(self.item_ids):
            raise ItemsimError("coordinates must be one row per item")
        if self.coordinates.shape[1] < 1:
            raise ItemsimError("embedding needs at least one dimension")
        if not np.all(np.isfinite(self.coordinates)):
            raise ItemsimError("coordinates must be finite")

    @property
    def dims(self) -> int:
        return self.coordinates.shape[1]


def _fix_signs(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip each component so its largest-magnitude loading is positive."""
    for c in range(vt.shape[0]):
        pivot = int(np.abs(vt[c]).argmax())
        if vt[c, pivot] < 0:
            vt[c] = -vt[c]
            u[:, c] = -u[:, c]
    return u, vt


def _centered_svd(m: FeatureMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if m.n_items < 2:
        raise ItemsimError("need at least 2 items")
    x = m.values - m.values.mean(axis=0, keepdims=True)
    u, sing, vt = np.linalg.svd(x, full_matrices=False)
    u, vt = _fix_signs(u, vt)
    return u, sing, vt


def pca_project(m: FeatureMatrix, dims: int) -> Embedding:
    """Project items onto the top principal directions of the column-centered
    feature matrix. Sign convention: each direction's largest-magnitude
    loading is positive."""
    limit = min(m.n_items, m.n_features)
    if not 1 <= dims <= limit:
        raise ItemsimError(f"dims={dims} out of range 1..{limit}")
    u, sing, _ = _centered_svd(m)
    coords = u[:, :dims] * sing[:dims]
    total = float((sing ** 2).sum())
    if total > 0:
        shares = tuple(float(s * s / total) for s in sing[:dims])
    else:
        shares = (0.0,) * dims
    return Embedding(item_ids=m.item_ids, coordinates=coords, explained_variance=shares)


def pca_decorrelate(m: FeatureMatrix) -> FeatureMatrix:
    """Full-rank PCA scores as features pc1..pck (group tag structural),
    ready to feed back into similarity_from_features."""
    u, sing, _ = _centered_svd(m)
    scores = u * sing
    k = scores.shape[1]
    return FeatureMatrix(
        item_ids=m.item_ids,
        groups=("structural",) * k,
        names=tuple(f"pc{c + 1}" for c in range(k)),
        values=scores,
    )


def mds_project(s: SimilarityMatrix, dims: int) -> Embedding:
    """Classical metric MDS on the dissimilarity d = max(S) - S: double-center
    -d^2/2, eigendecompose, embed with the top non-negative eigenvalues.
    Negative eigenvalues are clamped to zero and reported."""
    if s.missing_mask().any():
        raise ItemsimError("similarity matrix has missing entries")
    n = s.n_items
    if not 1 <= dims <= n - 1:
        raise ItemsimError(f"dims={dims} out of range 1..{n - 1}")
    d = float(s.values.max()) - s.values
    d2 = d * d
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * centering @ d2 @ centering
    b = (b + b.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(b)
    order = np.argsort(eigvals)[::-1][:dims]
    top = eigvals[order]
    clamped = int((top < 0).sum())
    if clamped:
        log.warning("MDS clamped %d negative eigenvalues (most negative %.3g)",
                    clamped, float(top.min()))
    coords = eigvecs[:, order] * np.sqrt(np.maximum(top, 0.0))
    for c in range(coords.shape[1]):
        col = coords[:, c]
        if np.abs(col).max() > 0 and col[int(np.abs(col).argmax())] < 0:
            coords[:, c] = -col
    return Embedding(item_ids=s.item_ids, coordinates=coords)
