"""
Two-dimensional views: PCA on features, MDS on similarities
===========================================================

PCA projects the item-by-feature matrix onto its top principal components
and reports how much variance each component explains. Classical MDS works
from a similarity matrix instead, reconstructing coordinates whose
distances match the implied dissimilarities; for genuinely Euclidean input
the reconstruction is exact.
"""

import numpy as np

from itemsim import (
    SimilarityMatrix,
    build_features,
    compute_measure,
    mds_project,
    pca_project,
)
from itemsim.synth import CorpusSpec, generate_corpus

corpus = generate_corpus(CorpusSpec(n_items=15, n_levels=3, seed=9))

# PCA over the combined bag-of-everything features.
features = build_features(corpus, "bag")
embedding = pca_project(features, dims=2)
print("explained variance shares:",
      [round(v, 3) for v in embedding.explained_variance])
print("first five items in PCA space:")
for item_id, (x, y) in list(zip(embedding.item_ids, embedding.coordinates))[:5]:
    print(f"  {item_id}  ({x:7.3f}, {y:7.3f})")

# MDS over a solution-based measure. Items of one level should land close
# together; compare mean within-level vs cross-level embedding distance.
s = compute_measure(corpus, "solution/log/correlation")
coords = mds_project(s, dims=2).coordinates
levels = np.array([it.level for it in corpus.items])
d = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2))
same = (levels[:, None] == levels[None, :]) & ~np.eye(len(coords), dtype=bool)
print(f"\nMDS mean distance within level {d[same].mean():.3f}"
      f" vs across levels {d[~same & ~np.eye(len(coords), dtype=bool)].mean():.3f}")

# Sanity check on exactly recoverable input: distances between ten planar
# points survive the round trip through MDS almost to machine precision.
rng = np.random.default_rng(0)
points = rng.normal(size=(10, 2))
dist = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
planar = SimilarityMatrix(tuple(f"p{i}" for i in range(10)), -dist, measure_name="plane")
rec = mds_project(planar, dims=2).coordinates
rec_dist = np.sqrt(((rec[:, None, :] - rec[None, :, :]) ** 2).sum(axis=2))
print(f"planar reconstruction error {np.abs(rec_dist - dist).max():.2e}")
