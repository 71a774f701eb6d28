"""Measure names and the pipeline that turns a name into a similarity matrix.

Grammar: `<source>/<transforms>/<metric>` where source is one of bag,
statement, solution, structural, world, performance; transforms is `none` or
a '+'-joined list of bin, log, max, idf, weights; metric is correlation,
cosine, or euclidean. The bare names ted, levenshtein, nw denote solution
edit-distance measures, and perfcorr denotes direct performance correlation.

`bag` concatenates statement word counts with solution keyword counts; the
`weights` transform multiplies the solution feature group by 5.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .corpus import Corpus, PerformanceRecord
from .editdist import NwScoring
from .errors import ItemsimError
from .features import (
    FeatureMatrix,
    TransformSpec,
    apply_transforms,
    concat_features,
    performance_features,
    restrict_items,
    solution_keyword_features,
    statement_bow,
    structural_features,
    world_features,
)
from .similarity import SimilarityMatrix, edit_similarity, performance_similarity, similarity_from_features

BARE_MEASURES = ("ted", "levenshtein", "nw", "perfcorr")

FEATURE_SOURCES = ("bag", "statement", "solution", "structural", "world", "performance")

TRANSFORM_TOKENS = ("bin", "log", "max", "idf", "weights")

METRIC_TOKENS = ("correlation", "cosine", "euclidean")

SOLUTION_WEIGHT_FACTOR = 5.0

_TOKEN_TO_SPEC = {
    "bin": TransformSpec("binarize"),
    "log": TransformSpec("log"),
    "max": TransformSpec("max_normalize"),
    "idf": TransformSpec("idf"),
    "weights": TransformSpec("scale", group="solution", factor=SOLUTION_WEIGHT_FACTOR),
}


@dataclass(frozen=True)
class MeasureName:
    """Parsed measure name. Bare edit-distance and performance-correlation
    measures have no metric; feature measures carry source, transform
    tokens, and metric."""

    source: str
    transforms: tuple[str, ...] = ()
    metric: str | None = None

    def __post_init__(self):
        if self.metric is None:
            if self.source not in BARE_MEASURES:
                raise ItemsimError(f"unknown measure {self.source!r}")
            if self.transforms:
                raise ItemsimError(f"measure {self.source!r} takes no transforms")
        else:
            if self.source not in FEATURE_SOURCES:
                raise ItemsimError(f"unknown feature source {self.source!r}")
            if self.metric not in METRIC_TOKENS:
                raise ItemsimError(f"unknown metric {self.metric!r}")
            for t in self.transforms:
                if t not in TRANSFORM_TOKENS:
                    raise ItemsimError(f"unknown transform token {t!r}")


def parse_measure(text: str) -> MeasureName:
    text = text.strip()
    if "/" not in text:
        return MeasureName(source=text)
    parts = text.split("/")
    if len(parts) != 3:
        raise ItemsimError(
            f"bad measure name {text!r}: expected <source>/<transforms>/<metric>"
        )
    source, transform_text, metric = parts
    if transform_text == "none":
        transforms: tuple[str, ...] = ()
    else:
        transforms = tuple(transform_text.split("+"))
        if any(not t for t in transforms):
            raise ItemsimError(f"bad transform list {transform_text!r}")
    return MeasureName(source=source, transforms=transforms, metric=metric)


def format_measure(name: MeasureName) -> str:
    if name.metric is None:
        return name.source
    transform_text = "+".join(name.transforms) if name.transforms else "none"
    return f"{name.source}/{transform_text}/{name.metric}"


@dataclass(frozen=True)
class MeasureParams:
    """Knobs shared by the measure pipeline: solution selection, aggregation
    over multiple solutions, alignment scoring, performance handling."""

    selector: str = "sample"
    aggregation: str = "min"
    nw_scoring: NwScoring = NwScoring()
    min_overlap: int = 10
    perf_measure: str = "log_time"
    stopwords: frozenset[str] = frozenset()
    unroll_cap: int = 100
    total_cap: int = 10000


def build_features(
    corpus: Corpus,
    source: str,
    records: list[PerformanceRecord] | None = None,
    params: MeasureParams = MeasureParams(),
) -> FeatureMatrix:
    """Feature matrix for one source name from the measure grammar."""
    if source == "statement":
        return statement_bow(corpus, stopwords=params.stopwords)
    if source == "solution":
        selector = "all_weighted" if params.selector == "all" else params.selector
        return solution_keyword_features(corpus, selector=selector)
    if source == "structural":
        return structural_features(corpus)
    if source == "world":
        return world_features(corpus)
    if source == "performance":
        if records is None:
            raise ItemsimError("performance features need performance records")
        return performance_features(records, item_ids=corpus.item_ids)
    if source == "bag":
        statement = statement_bow(corpus, stopwords=params.stopwords)
        selector = "all_weighted" if params.selector == "all" else params.selector
        solution = solution_keyword_features(corpus, selector=selector)
        statement = restrict_items(statement, solution.item_ids)
        return concat_features([statement, solution])
    raise ItemsimError(f"unknown feature source {source!r}")


def transform_specs(tokens: tuple[str, ...]) -> list[TransformSpec]:
    unknown = [t for t in tokens if t not in _TOKEN_TO_SPEC]
    if unknown:
        raise ItemsimError(f"unknown transform tokens: {', '.join(unknown)}")
    return [_TOKEN_TO_SPEC[t] for t in tokens]


def compute_measure(
    corpus: Corpus,
    name: MeasureName | str,
    records: list[PerformanceRecord] | None = None,
    params: MeasureParams = MeasureParams(),
) -> SimilarityMatrix:
    """Similarity matrix for one named measure over a corpus."""
    if isinstance(name, str):
        name = parse_measure(name)
    canonical = format_measure(name)
    if name.metric is None:
        if name.source == "perfcorr":
            if records is None:
                raise ItemsimError("perfcorr needs performance records")
            s = performance_similarity(
                records,
                measure=params.perf_measure,
                min_overlap=params.min_overlap,
                item_ids=corpus.item_ids,
            )
        else:
            s = edit_similarity(
                corpus,
                kind=name.source,
                selector=params.selector,
                aggregation=params.aggregation,
                nw_scoring=params.nw_scoring,
                unroll_cap=params.unroll_cap,
                total_cap=params.total_cap,
            )
        return replace(s, measure_name=canonical)
    m = build_features(corpus, name.source, records=records, params=params)
    m = apply_transforms(m, transform_specs(name.transforms))
    metric = "pearson" if name.metric == "correlation" else name.metric
    return similarity_from_features(m, metric=metric, measure_name=canonical)
