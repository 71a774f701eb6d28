"""
Named measures and how much they agree with each other
======================================================

A measure name is a compact recipe: either a bare edit-distance measure
(`ted`, `levenshtein`, `nw`, `perfcorr`) or `<source>/<transforms>/<metric>`.
Computing several measures over one corpus gives a stack of similarity
matrices; the agreement matrix correlates them pairwise, and meta-agreement
asks whether two different agreement methods tell the same story.
"""

import numpy as np

from itemsim import (
    agreement_matrix,
    compute_measure,
    meta_agreement,
    parse_measure,
)
from itemsim.synth import CorpusSpec, generate_corpus

# A synthetic corpus with known difficulty levels stands in for real data.
corpus = generate_corpus(CorpusSpec(n_items=12, n_levels=3, seed=4))

names = [
    "ted",                            # tree edit distance between solutions
    "levenshtein",                    # canonical token sequences
    "solution/log/correlation",       # keyword counts, log-compressed
    "solution/log+idf/correlation",   # ... with rare keywords upweighted
    "statement/log/correlation",      # statement words instead of solutions
]
for text in names:
    parsed = parse_measure(text)
    print(f"{text:32s} -> source={parsed.source!r} transforms={parsed.transforms}"
          f" metric={parsed.metric!r}")

measures = [compute_measure(corpus, n) for n in names]
first = measures[0]
print("\nted similarity between the first three items:")
print(np.round(first.values[:3, :3], 3))

# Level 2: correlate the flattened item-pair similarities of every pair of
# measures. Solution-based measures should band together; the statement
# measure lives on an independent data source and stays near zero.
agree = agreement_matrix(measures, method="correlation")
print("\nagreement (pairwise correlation of measures):")
for name, row in zip(agree.measure_names, agree.values):
    print(f"  {name:32s}", [float(round(v, 2)) for v in row])

# Level 3: a single scalar comparing two agreement methods. High values
# mean "correlation agreement" and "top-3 neighbor agreement" rank measure
# pairs the same way.
top3 = agreement_matrix(measures, method="top:3")
print("\nmeta-agreement correlation vs top:3 =",
      round(meta_agreement(agree, top3), 3))
