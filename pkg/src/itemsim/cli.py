"""Command-line front end: itemsim <subcommand> -c config.json -o outdir.

Subcommands: features, sim, agree, meta-agree, cluster, project, stability,
synth, heatmap. Configuration is a JSON object with "schema": 1; every
output is a pure function of the corpus bytes and the config bytes, so
reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .analysis import (
    Partition,
    agreement_matrix,
    cluster_eval,
    kmeans,
    meta_agreement,
    split_half_stability,
)
from .corpus import Corpus, load_corpus, load_performance, save_corpus, save_performance
from .editdist import NwScoring
from .errors import ConfigError, ItemsimError
from .features import apply_transforms
from .heatmap import heatmap_svg
from .measures import (
    MeasureParams,
    TRANSFORM_TOKENS,
    build_features,
    compute_measure,
    parse_measure,
    transform_specs,
)
from .projection import mds_project, pca_project
from .serialize import (
    embedding_csv,
    agreement_csv,
    feature_csv,
    partition_csv,
    read_square_csv,
    scalar_text,
    similarity_csv,
    write_text,
)
from .similarity import restrict
from .synth import CorpusSpec, PerfSpec, generate_corpus, generate_performance, level_partition

log = logging.getLogger("itemsim.cli")

_CONFIG_KEYS = {
    "schema", "corpus", "performance", "stopwords", "measure", "measures",
    "method", "methods", "selector", "aggregation", "min_overlap",
    "perf_measure", "nw", "unroll_cap", "total_cap", "seed", "k", "runs",
    "restarts", "source", "transforms", "projection", "dims", "synth",
    "matrix", "ordering",
}

_SYNTH_KEYS = {
    "n_items", "n_levels", "concepts_per_level", "statement_vocab",
    "statement_len", "noise_tokens", "seed", "performance",
}

_PERF_KEYS = {"n_learners", "solve_prob", "skill_sd", "difficulty_sd", "noise_sd", "seed"}


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from e
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: malformed JSON: {e}") from e
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    if obj.get("schema") != 1:
        raise ConfigError(f'{path}: config needs "schema": 1')
    unknown = sorted(set(obj) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(unknown)}")
    return obj


def _require(cfg: dict, key: str, kind: type, what: str):
    if key not in cfg:
        raise ConfigError(f"config needs {key!r} for {what}")
    value = cfg[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise ConfigError(f"config key {key!r} must be a {kind.__name__}")
    return value


def _optional(cfg: dict, key: str, kind: type, default):
    if key not in cfg:
        return default
    value = cfg[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise ConfigError(f"config key {key!r} must be a {kind.__name__}")
    return value


def _load_corpus(cfg: dict) -> Corpus:
    return load_corpus(_require(cfg, "corpus", str, "this subcommand"))


def _load_records(cfg: dict, corpus: Corpus | None, required: bool):
    if "performance" in cfg:
        return load_performance(_require(cfg, "performance", str, "performance data"), corpus)
    if "corpus" in cfg:
        default = Path(cfg["corpus"]) / "performance.csv"
        if default.is_file():
            return load_performance(default, corpus)
    if required:
        raise ConfigError('config needs "performance" (or a corpus performance.csv)')
    return None


def _measure_params(cfg: dict) -> MeasureParams:
    stopwords: frozenset[str] = frozenset()
    if "stopwords" in cfg:
        path = _require(cfg, "stopwords", str, "stopwords")
        words = Path(path).read_text(encoding="utf-8").split()
        stopwords = frozenset(w.lower() for w in words)
    nw = _optional(cfg, "nw", dict, {})
    unknown = sorted(set(nw) - {"match", "mismatch", "gap"})
    if unknown:
        raise ConfigError(f"unknown nw keys: {', '.join(unknown)}")
    scoring = NwScoring(
        match=float(nw.get("match", 1.0)),
        mismatch=float(nw.get("mismatch", -1.0)),
        gap=float(nw.get("gap", -1.0)),
    )
    return MeasureParams(
        selector=_optional(cfg, "selector", str, "sample"),
        aggregation=_optional(cfg, "aggregation", str, "min"),
        nw_scoring=scoring,
        min_overlap=_optional(cfg, "min_overlap", int, 10),
        perf_measure=_optional(cfg, "perf_measure", str, "log_time"),
        stopwords=stopwords,
        unroll_cap=_optional(cfg, "unroll_cap", int, 100),
        total_cap=_optional(cfg, "total_cap", int, 10000),
    )


def _seed(cfg: dict, args) -> int:
    if args.seed is not None:
        return args.seed
    return _optional(cfg, "seed", int, 0)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _measure_names(cfg: dict, args) -> list[str]:
    if args.measures:
        return [m for m in args.measures.split(",") if m]
    names = _require(cfg, "measures", list, "agreement")
    if not all(isinstance(n, str) for n in names):
        raise ConfigError('config key "measures" must be a list of strings')
    return names


def _method(cfg: dict, args, default: str = "correlation") -> str:
    method = args.method if getattr(args, "method", None) else _optional(cfg, "method", str, default)
    return _normalize_method(method)


def _normalize_method(method: str) -> str:
    return "correlation" if method in ("corr", "correlation") else method


def _needs_performance(names: list[str]) -> bool:
    return any(parse_measure(n).source in ("perfcorr", "performance") for n in names)


def _computed_measures(cfg: dict, args, names: list[str]):
    corpus = _load_corpus(cfg)
    params = _measure_params(cfg)
    records = _load_records(cfg, corpus, required=_needs_performance(names))
    matrices = [compute_measure(corpus, n, records=records, params=params) for n in names]
    common = [i for i in corpus.item_ids if all(i in m.item_ids for m in matrices)]
    if not common:
        raise ItemsimError("measures share no items")
    return [restrict(m, tuple(common)) for m in matrices]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_features(args) -> None:
    cfg = load_config(args.config)
    corpus = _load_corpus(cfg)
    params = _measure_params(cfg)
    source = _require(cfg, "source", str, "features")
    records = _load_records(cfg, corpus, required=source == "performance")
    tokens = tuple(_optional(cfg, "transforms", list, []))
    for t in tokens:
        if t not in TRANSFORM_TOKENS:
            raise ConfigError(f"unknown transform token {t!r}")
    m = build_features(corpus, source, records=records, params=params)
    m = apply_transforms(m, transform_specs(tokens))
    write_text(_out_dir(args) / "features.csv", feature_csv(m))


def cmd_sim(args) -> None:
    cfg = load_config(args.config)
    name = parse_measure(_require(cfg, "measure", str, "sim"))
    corpus = _load_corpus(cfg)
    params = _measure_params(cfg)
    records = _load_records(cfg, corpus, required=_needs_performance([_require(cfg, "measure", str, "sim")]))
    s = compute_measure(corpus, name, records=records, params=params)
    write_text(_out_dir(args) / "sim.csv", similarity_csv(s))


def cmd_agree(args) -> None:
    cfg = load_config(args.config)
    names = _measure_names(cfg, args)
    if len(names) < 2:
        raise ItemsimError("need at least 2 measures")
    matrices = _computed_measures(cfg, args, names)
    a = agreement_matrix(matrices, method=_method(cfg, args))
    write_text(_out_dir(args) / "agreement.csv", agreement_csv(a))


def cmd_meta_agree(args) -> None:
    cfg = load_config(args.config)
    names = _measure_names(cfg, args)
    if len(names) < 2:
        raise ItemsimError("need at least 2 measures")
    methods = _optional(cfg, "methods", list, ["correlation", "top:5"])
    if len(methods) != 2 or not all(isinstance(m, str) for m in methods):
        raise ConfigError('config key "methods" must be a list of two method strings')
    matrices = _computed_measures(cfg, args, names)
    a1 = agreement_matrix(matrices, method=_normalize_method(methods[0]))
    a2 = agreement_matrix(matrices, method=_normalize_method(methods[1]))
    write_text(_out_dir(args) / "meta_agree.txt", scalar_text(meta_agreement(a1, a2)))


def cmd_cluster(args) -> None:
    cfg = load_config(args.config)
    name = _require(cfg, "measure", str, "cluster")
    corpus = _load_corpus(cfg)
    params = _measure_params(cfg)
    records = _load_records(cfg, corpus, required=_needs_performance([name]))
    s = compute_measure(corpus, name, records=records, params=params)
    k = _optional(cfg, "k", int, 9)
    runs = _optional(cfg, "runs", int, 10)
    restarts = _optional(cfg, "restarts", int, 1)
    seed = _seed(cfg, args)
    manual_full = level_partition(corpus)
    index = dict(zip(manual_full.item_ids, manual_full.labels))
    manual = Partition(item_ids=s.item_ids, labels=tuple(index[i] for i in s.item_ids))
    part = kmeans(s, k, seed=seed, restarts=restarts)
    out = _out_dir(args)
    write_text(out / "partition.csv", partition_csv(part))
    write_text(out / "rand_index.txt", scalar_text(cluster_eval(s, manual, k, runs=runs, seed=seed)))


def cmd_project(args) -> None:
    cfg = load_config(args.config)
    corpus = _load_corpus(cfg)
    params = _measure_params(cfg)
    kind = _optional(cfg, "projection", str, "pca")
    dims = _optional(cfg, "dims", int, 2)
    if kind == "pca":
        source = _require(cfg, "source", str, "pca projection")
        records = _load_records(cfg, corpus, required=source == "performance")
        tokens = tuple(_optional(cfg, "transforms", list, []))
        m = build_features(corpus, source, records=records, params=params)
        m = apply_transforms(m, transform_specs(tokens))
        embedding = pca_project(m, dims)
    elif kind == "mds":
        name = _require(cfg, "measure", str, "mds projection")
        records = _load_records(cfg, corpus, required=_needs_performance([name]))
        s = compute_measure(corpus, name, records=records, params=params)
        embedding = mds_project(s, dims)
    else:
        raise ConfigError(f"unknown projection {kind!r}; use pca or mds")
    write_text(_out_dir(args) / "embedding.csv", embedding_csv(embedding))


def cmd_stability(args) -> None:
    cfg = load_config(args.config)
    corpus = _load_corpus(cfg) if "corpus" in cfg else None
    records = _load_records(cfg, corpus, required=True)
    params = _measure_params(cfg)
    value = split_half_stability(
        records,
        measure=params.perf_measure,
        min_overlap=params.min_overlap,
        seed=_seed(cfg, args),
    )
    write_text(_out_dir(args) / "stability.txt", scalar_text(value))


def cmd_synth(args) -> None:
    cfg = load_config(args.config)
    synth_cfg = _require(cfg, "synth", dict, "synth")
    unknown = sorted(set(synth_cfg) - _SYNTH_KEYS)
    if unknown:
        raise ConfigError(f"unknown synth keys: {', '.join(unknown)}")
    perf_cfg = synth_cfg.pop("performance", None)
    if args.seed is not None:
        synth_cfg["seed"] = args.seed
    try:
        spec = CorpusSpec(**synth_cfg)
    except TypeError as e:
        raise ConfigError(f"bad synth spec: {e}") from e
    corpus = generate_corpus(spec)
    out = _out_dir(args)
    save_corpus(corpus, out)
    if perf_cfg is not None:
        unknown = sorted(set(perf_cfg) - _PERF_KEYS)
        if unknown:
            raise ConfigError(f"unknown synth performance keys: {', '.join(unknown)}")
        records = generate_performance(corpus, PerfSpec(**perf_cfg))
        save_performance(records, out / "performance.csv")


def cmd_heatmap(args) -> None:
    cfg = load_config(args.config)
    matrix_path = _require(cfg, "matrix", str, "heatmap")
    ordering = _optional(cfg, "ordering", str, "none")
    text = Path(matrix_path).read_text(encoding="utf-8")
    ids, values = read_square_csv(text, source=matrix_path)
    write_text(_out_dir(args) / "heatmap.svg", heatmap_svg(ids, values, ordering=ordering))


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line errors, exit code 1
        raise ItemsimError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="itemsim", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    commands = {
        "features": (cmd_features, "write a feature matrix CSV"),
        "sim": (cmd_sim, "write a similarity matrix CSV for one measure"),
        "agree": (cmd_agree, "write the pairwise agreement matrix for several measures"),
        "meta-agree": (cmd_meta_agree, "compare two agreement methods (level 3 scalar)"),
        "cluster": (cmd_cluster, "k-means partition plus Rand index against level labels"),
        "project": (cmd_project, "PCA or MDS embedding CSV"),
        "stability": (cmd_stability, "split-half stability of the performance measure"),
        "synth": (cmd_synth, "generate a synthetic corpus directory"),
        "heatmap": (cmd_heatmap, "render a square matrix CSV as an SVG heatmap"),
    }
    for name, (func, help_text) in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-c", "--config", required=True, help="path to JSON config")
        p.add_argument("-o", "--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name in ("agree", "meta-agree"):
            p.add_argument("--measures", default=None, help="comma-separated measure names")
        if name == "agree":
            p.add_argument("--method", default=None, help="corr or top:<N>")
        p.set_defaults(func=func)
    return parser


def _configure_logging() -> None:
    levels = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    name = os.environ.get("ITEMSIM_LOG", "warn").lower()
    if name not in levels:
        name = "warn"
    logging.basicConfig(stream=sys.stderr, level=levels[name],
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except (ItemsimError, OSError) as e:
        message = " ".join(str(e).split())
        print(f"error: {message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
