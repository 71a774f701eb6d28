"""Agreement levels, split-half stability, clustering quality."""

import numpy as np
import pytest

from itemsim import (
    AgreementMatrix,
    ItemsimError,
    Partition,
    PerformanceRecord,
    SimilarityMatrix,
    agreement_correlation,
    agreement_matrix,
    agreement_topn,
    cluster_eval,
    flatten_pairs,
    hierarchical_order,
    kmeans,
    meta_agreement,
    rand_index,
    split_half_stability,
)
from itemsim.synth import CorpusSpec, PerfSpec, generate_corpus, generate_performance

from conftest import random_similarity
from oracles import oracle_best_two_partition


def sim(values, ids=None, name="m"):
    values = np.asarray(values, dtype=np.float64)
    ids = ids or tuple(chr(ord("a") + i) for i in range(len(values)))
    return SimilarityMatrix(item_ids=tuple(ids), values=values, measure_name=name)


def pair_sim(ids, pairs, name="m"):
    """Build a matrix from {(i, j): value} over item names."""
    n = len(ids)
    index = {x: i for i, x in enumerate(ids)}
    v = np.eye(n)
    for (x, y), val in pairs.items():
        v[index[x], index[y]] = v[index[y], index[x]] = val
    return SimilarityMatrix(item_ids=tuple(ids), values=v, measure_name=name)


class TestFlattenPairs:
    def test_three_items_give_three_pairs(self):
        s = sim([[1.0, 0.5, 0.2], [0.5, 1.0, 0.7], [0.2, 0.7, 1.0]])
        pairs = flatten_pairs(s)
        assert len(pairs) == 3
        assert pairs[0] == (("a", "b"), 0.5)
        assert pairs[2] == (("b", "c"), 0.7)

    def test_single_item_gives_none(self):
        assert flatten_pairs(sim([[1.0]])) == []

    def test_missing_entries_skipped(self):
        v = np.array([[1.0, np.nan, 0.2], [np.nan, 1.0, 0.7], [0.2, 0.7, 1.0]])
        pairs = flatten_pairs(sim(v))
        assert [p[0] for p in pairs] == [("a", "c"), ("b", "c")]


class TestAgreementCorrelation:
    def test_affine_transform_agrees_perfectly(self):
        s = sim([[1.0, 0.5, 0.2], [0.5, 1.0, 0.7], [0.2, 0.7, 1.0]], name="s")
        t = sim(2.0 * s.values + 3.0, ids=s.item_ids, name="t")
        assert agreement_correlation(s, t) == pytest.approx(1.0, abs=1e-12)

    def test_negation_agrees_negatively(self):
        s = sim([[1.0, 0.5, 0.2], [0.5, 1.0, 0.7], [0.2, 0.7, 1.0]], name="s")
        t = sim(-s.values, ids=s.item_ids, name="t")
        assert agreement_correlation(s, t) == pytest.approx(-1.0, abs=1e-12)

    def test_missing_pairs_are_dropped_from_both(self):
        v1 = np.array([[1.0, np.nan, 0.2, 0.9],
                       [np.nan, 1.0, 0.7, 0.1],
                       [0.2, 0.7, 1.0, 0.4],
                       [0.9, 0.1, 0.4, 1.0]])
        s1 = sim(v1, name="s1")
        s2 = sim(np.where(np.isnan(v1), 0.0, 2 * v1), ids=s1.item_ids, name="s2")
        assert agreement_correlation(s1, s2) == pytest.approx(1.0, abs=1e-12)

    def test_too_few_common_pairs(self):
        v = np.full((3, 3), np.nan)
        np.fill_diagonal(v, 1.0)
        v[0, 1] = v[1, 0] = 0.5
        s1, s2 = sim(v, name="x"), sim(v, name="y")
        with pytest.raises(ItemsimError, match="only 1 common defined pairs"):
            agreement_correlation(s1, s2)

    def test_zero_variance(self):
        s1 = sim(np.ones((3, 3)), name="x")
        s2 = sim([[1.0, 0.5, 0.2], [0.5, 1.0, 0.7], [0.2, 0.7, 1.0]], name="y")
        with pytest.raises(ItemsimError, match="zero variance"):
            agreement_correlation(s1, s2)

    def test_item_set_mismatch(self):
        s1 = sim(np.eye(2), ids=("a", "b"))
        s2 = sim(np.eye(2), ids=("a", "c"))
        with pytest.raises(ItemsimError, match="different item sets"):
            agreement_correlation(s1, s2)


class TestAgreementTopn:
    def test_half_overlap_hand_example(self):
        ids = ("a", "b", "c", "d")
        s1 = pair_sim(ids, {("a", "b"): 0.9, ("a", "c"): 0.8, ("a", "d"): 0.1,
                            ("b", "c"): 0.7, ("b", "d"): 0.2, ("c", "d"): 0.3},
                      name="s1")
        s2 = pair_sim(ids, {("a", "b"): 0.9, ("a", "d"): 0.8, ("a", "c"): 0.1,
                            ("b", "d"): 0.7, ("b", "c"): 0.2, ("c", "d"): 0.3},
                      name="s2")
        # every item shares exactly one of its two top neighbors
        assert agreement_topn(s1, s2, 2) == pytest.approx(0.5)

    def test_identical_rankings_score_one(self):
        rng = np.random.default_rng(3)
        s = random_similarity(rng, n=8)
        assert agreement_topn(s, s, 3) == 1.0

    def test_ties_break_by_item_id(self):
        ids = ("a", "b", "c")
        s1 = pair_sim(ids, {("a", "b"): 0.5, ("a", "c"): 0.5, ("b", "c"): 0.0}, "s1")
        s2 = pair_sim(ids, {("a", "b"): 0.1, ("a", "c"): 0.9, ("b", "c"): 0.0}, "s2")
        # item a ties b and c at 0.5 in s1 and must pick b (smaller id),
        # missing s2's pick c; items b and c both pick a in both matrices
        assert agreement_topn(s1, s2, 1) == pytest.approx(2 / 3)

    def test_items_with_too_few_neighbors_are_skipped(self):
        v = np.array([[1.0, np.nan, np.nan],
                      [np.nan, 1.0, 0.5],
                      [np.nan, 0.5, 1.0]])
        s1, s2 = sim(v, name="x"), sim(v.copy(), name="y")
        assert agreement_topn(s1, s2, 1) == 1.0  # item a skipped, b and c agree

    def test_no_item_with_enough_neighbors(self):
        v = np.full((3, 3), np.nan)
        np.fill_diagonal(v, 1.0)
        s1, s2 = sim(v, name="x"), sim(v.copy(), name="y")
        with pytest.raises(ItemsimError, match="no item has 2 defined neighbors"):
            agreement_topn(s1, s2, 2)

    def test_n_must_be_positive(self):
        s = sim(np.eye(2))
        with pytest.raises(ItemsimError, match="positive"):
            agreement_topn(s, s, 0)


class TestAgreementMatrix:
    def make_measures(self, k=3, n=6, seed=0):
        rng = np.random.default_rng(seed)
        return [random_similarity(rng, n=n, name=f"m{i}") for i in range(k)]

    def test_identical_measures_agree_exactly(self):
        rng = np.random.default_rng(1)
        s = random_similarity(rng, n=5, name="one")
        t = SimilarityMatrix(s.item_ids, s.values.copy(), "two")
        a = agreement_matrix([s, t])
        assert a.values.tolist() == [[1.0, 1.0], [1.0, 1.0]]
        assert a.measure_names == ("one", "two")
        assert a.method == "correlation"

    def test_topn_method(self):
        measures = self.make_measures()
        a = agreement_matrix(measures, method="top:2")
        assert a.method == "top:2"
        assert np.all(np.diag(a.values) == 1.0)
        assert np.all((a.values >= 0) & (a.values <= 1))

    def test_needs_two_measures(self):
        with pytest.raises(ItemsimError, match="at least 2 measures"):
            agreement_matrix(self.make_measures(k=1))

    def test_duplicate_names_rejected(self):
        rng = np.random.default_rng(2)
        s = random_similarity(rng, n=5, name="same")
        t = random_similarity(rng, n=5, name="same")
        with pytest.raises(ItemsimError, match="duplicate measure names"):
            agreement_matrix([s, t])

    def test_unknown_method(self):
        with pytest.raises(ItemsimError, match="unknown agreement method"):
            agreement_matrix(self.make_measures(), method="spearman")
        with pytest.raises(ItemsimError, match="unknown agreement method"):
            agreement_matrix(self.make_measures(), method="top:0")

    def test_validation_of_matrix_object(self):
        with pytest.raises(ItemsimError, match="diagonal"):
            AgreementMatrix(("x", "y"), np.array([[0.5, 0.2], [0.2, 1.0]]),
                            "correlation")


class TestMetaAgreement:
    def test_two_by_two_has_too_few_entries(self):
        a = AgreementMatrix(("x", "y"), np.array([[1.0, 0.5], [0.5, 1.0]]),
                            "correlation")
        with pytest.raises(ItemsimError, match="only 1 off-diagonal"):
            meta_agreement(a, a)

    def test_identical_methods_correlate_perfectly(self):
        names = ("x", "y", "z")
        v = np.array([[1.0, 0.5, 0.2], [0.5, 1.0, 0.7], [0.2, 0.7, 1.0]])
        a1 = AgreementMatrix(names, v, "correlation")
        a2 = AgreementMatrix(names, (v + np.eye(3)) / 2, "top:3")
        assert meta_agreement(a1, a2) == pytest.approx(1.0, abs=1e-12)

    def test_measure_set_mismatch(self):
        v = np.eye(3)
        a1 = AgreementMatrix(("x", "y", "z"), v, "correlation")
        a2 = AgreementMatrix(("x", "y", "w"), v, "correlation")
        with pytest.raises(ItemsimError, match="different measure sets"):
            meta_agreement(a1, a2)


class TestSplitHalfStability:
    def test_structured_performance_is_stable(self):
        corpus = generate_corpus(CorpusSpec(n_items=12, n_levels=3, seed=5))
        records = generate_performance(
            corpus, PerfSpec(n_learners=300, skill_sd=1.0, noise_sd=0.4, seed=5))
        assert split_half_stability(records, seed=0) > 0.5

    def test_pure_noise_is_unstable(self):
        corpus = generate_corpus(CorpusSpec(n_items=10, n_levels=1, seed=7))
        records = generate_performance(
            corpus, PerfSpec(n_learners=500, skill_sd=0.0, difficulty_sd=0.0,
                             noise_sd=1.0, seed=7))
        assert abs(split_half_stability(records, seed=0)) < 0.15

    def test_bit_reproducible(self):
        corpus = generate_corpus(CorpusSpec(n_items=8, n_levels=2, seed=3))
        records = generate_performance(corpus, PerfSpec(n_learners=60, seed=3))
        a = split_half_stability(records, min_overlap=5, seed=11)
        b = split_half_stability(records, min_overlap=5, seed=11)
        assert a == b

    def test_seed_changes_split(self):
        corpus = generate_corpus(CorpusSpec(n_items=8, n_levels=2, seed=3))
        records = generate_performance(
            corpus, PerfSpec(n_learners=40, noise_sd=1.5, seed=3))
        values = {split_half_stability(records, min_overlap=5, seed=s) for s in range(8)}
        assert len(values) > 1

    def test_needs_two_learners(self):
        records = [PerformanceRecord("solo", "a", 1.0, True)]
        with pytest.raises(ItemsimError, match="at least 2 learners"):
            split_half_stability(records)


class TestKmeans:
    def test_k_equals_n_gives_singletons(self):
        rng = np.random.default_rng(4)
        s = random_similarity(rng, n=5)
        p = kmeans(s, k=5, seed=0)
        assert sorted(p.labels) == [0, 1, 2, 3, 4]

    def test_duplicate_rows_cluster_together(self):
        v = np.array([
            [1.0, 1.0, 0.2, 0.3],
            [1.0, 1.0, 0.2, 0.3],
            [0.2, 0.2, 1.0, 0.9],
            [0.3, 0.3, 0.9, 1.0],
        ])
        p = kmeans(sim(v), k=2, seed=0)
        assert p.labels[0] == p.labels[1]

    def test_recovers_two_blocks_and_matches_exhaustive_wcss(self):
        ids = tuple("abcdef")
        v = np.full((6, 6), 0.1)
        v[:3, :3] = 0.9
        v[3:, 3:] = 0.9
        np.fill_diagonal(v, 1.0)
        s = sim(v, ids=ids)
        p = kmeans(s, k=2, seed=0, restarts=5)
        assert len(set(p.labels[:3])) == 1
        assert len(set(p.labels[3:])) == 1
        assert p.labels[0] != p.labels[3]
        oracle_labels, _ = oracle_best_two_partition(v)
        assert rand_index(p, Partition(ids, oracle_labels)) == 1.0

    def test_missing_entries_rejected(self):
        rng = np.random.default_rng(5)
        s = random_similarity(rng, n=6, missing=0.3)
        with pytest.raises(ItemsimError, match="missing entries"):
            kmeans(s, k=2)

    def test_k_out_of_range(self):
        rng = np.random.default_rng(6)
        s = random_similarity(rng, n=4)
        with pytest.raises(ItemsimError, match="out of range"):
            kmeans(s, k=0)
        with pytest.raises(ItemsimError, match="out of range"):
            kmeans(s, k=5)

    def test_deterministic_for_seed(self):
        rng = np.random.default_rng(7)
        s = random_similarity(rng, n=12)
        assert kmeans(s, k=3, seed=9).labels == kmeans(s, k=3, seed=9).labels


class TestRandIndex:
    def test_alternating_pair_example(self):
        ids = tuple("abcd")
        p1 = Partition(ids, (0, 0, 1, 1))
        p2 = Partition(ids, (0, 1, 0, 1))
        assert rand_index(p1, p2) == pytest.approx(1 / 3)

    def test_identical_partitions(self):
        ids = tuple("abcd")
        p = Partition(ids, (0, 1, 1, 0))
        assert rand_index(p, p) == 1.0

    def test_label_permutation_invariant(self):
        ids = tuple("abcde")
        p1 = Partition(ids, (0, 0, 1, 2, 1))
        p2 = Partition(ids, (2, 2, 0, 1, 0))
        assert rand_index(p1, p2) == 1.0

    def test_item_mismatch_and_size(self):
        with pytest.raises(ItemsimError, match="different item sets"):
            rand_index(Partition(("a",), (0,)), Partition(("b",), (0,)))
        with pytest.raises(ItemsimError, match="at least 2 items"):
            rand_index(Partition(("a",), (0,)), Partition(("a",), (0,)))

    def test_partition_validation(self):
        with pytest.raises(ItemsimError, match="one label per item"):
            Partition(("a", "b"), (0,))
        with pytest.raises(ItemsimError, match="non-negative"):
            Partition(("a",), (-1,))


class TestClusterEval:
    def test_clean_blocks_score_one(self):
        v = np.full((6, 6), 0.1)
        v[:3, :3] = 0.9
        v[3:, 3:] = 0.9
        np.fill_diagonal(v, 1.0)
        s = sim(v, ids=tuple("abcdef"))
        manual = Partition(tuple("abcdef"), (0, 0, 0, 1, 1, 1))
        assert cluster_eval(s, manual, k=2, runs=5, seed=0) == 1.0

    def test_manual_partition_must_match(self):
        rng = np.random.default_rng(8)
        s = random_similarity(rng, n=4)
        manual = Partition(("x", "y", "z", "w"), (0, 1, 0, 1))
        with pytest.raises(ItemsimError, match="manual partition"):
            cluster_eval(s, manual, k=2)

    def test_mean_over_seeded_runs(self):
        rng = np.random.default_rng(9)
        s = random_similarity(rng, n=10)
        manual = Partition(s.item_ids, tuple(i % 2 for i in range(10)))
        expected = np.mean([
            rand_index(kmeans(s, 3, seed=4 + r), manual) for r in range(6)
        ])
        assert cluster_eval(s, manual, k=3, runs=6, seed=4) == pytest.approx(expected)


class TestHierarchicalOrder:
    def test_single_item(self):
        assert hierarchical_order(sim([[1.0]])) == [0]

    def test_identical_rows_end_up_adjacent(self):
        # a and c are identical (similarity 1 = max), so their distance is 0
        # and they merge first
        v = np.array([
            [1.0, 0.2, 1.0, 0.4],
            [0.2, 1.0, 0.2, 0.6],
            [1.0, 0.2, 1.0, 0.4],
            [0.4, 0.6, 0.4, 1.0],
        ])
        order = hierarchical_order(sim(v))
        pos = {idx: rank for rank, idx in enumerate(order)}
        assert abs(pos[0] - pos[2]) == 1

    def test_returns_permutation(self):
        rng = np.random.default_rng(10)
        s = random_similarity(rng, n=9)
        assert sorted(hierarchical_order(s)) == list(range(9))

    def test_missing_entries_rejected(self):
        rng = np.random.default_rng(11)
        s = random_similarity(rng, n=5, missing=0.4)
        with pytest.raises(ItemsimError, match="missing entries"):
            hierarchical_order(s)
