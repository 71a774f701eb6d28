"""Corpus data model, directory loading and saving, performance logs."""

import json
import logging

import pytest

from itemsim import (
    Corpus,
    Item,
    ItemsimError,
    PerformanceRecord,
    Solution,
    WorldSpec,
    load_corpus,
    load_performance,
    node,
    save_corpus,
    save_performance,
    select_solutions,
)
from itemsim.corpus import items_index_json, performance_csv, read_performance

from conftest import make_tiny_corpus


class TestWorldSpec:
    def test_counts_cells_per_concept(self):
        w = WorldSpec(grid=("DMD", "..M"), legend={"D": "diamond", "M": "meteorite"})
        assert w.rows == 2
        assert w.cols == 3
        assert w.concept_counts() == {"diamond": 2, "meteorite": 2}

    def test_codes_sharing_a_concept_are_summed(self):
        w = WorldSpec(grid=("ab",), legend={"a": "color", "b": "color"})
        assert w.concept_counts() == {"color": 2}

    def test_blank_cells_need_no_legend(self):
        w = WorldSpec(grid=(" .", ". "), legend={})
        assert w.concept_counts() == {}

    def test_ragged_grid_rejected(self):
        with pytest.raises(ItemsimError, match="unequal"):
            WorldSpec(grid=("ab", "a"), legend={"a": "x", "b": "y"})

    def test_unknown_cell_code_rejected(self):
        with pytest.raises(ItemsimError, match="legend"):
            WorldSpec(grid=("Z",), legend={})


class TestSolutionAndItem:
    def test_weight_must_be_positive(self):
        for bad in (0.0, -1.0, float("nan"), float("inf")):
            with pytest.raises(ItemsimError):
                Solution(ast=node("move"), weight=bad)

    def test_kind_restricted(self):
        with pytest.raises(ItemsimError, match="kind"):
            Solution(ast=node("move"), kind="grader")

    def test_item_id_charset(self):
        with pytest.raises(ItemsimError, match="invalid item id"):
            Item(id="bad id", statement_text="x")
        with pytest.raises(ItemsimError, match="invalid item id"):
            Item(id="", statement_text="x")

    def test_item_needs_some_content(self):
        with pytest.raises(ItemsimError, match="no statement"):
            Item(id="a")

    def test_command_limit_positive(self):
        with pytest.raises(ItemsimError, match="command_limit"):
            Item(id="a", statement_text="x", command_limit=0)

    def test_sample_and_learner_accessors(self):
        sample = Solution(ast=node("move"), kind="sample")
        learner = Solution(ast=node("left"), kind="learner")
        item = Item(id="a", solutions=(learner, sample))
        assert item.sample_solution() is sample
        assert item.learner_solutions() == (learner,)


class TestSelectSolutions:
    def setup_method(self):
        self.sample = Solution(ast=node("move"), kind="sample")
        self.light = Solution(ast=node("left"), weight=1.0, kind="learner")
        self.heavy = Solution(ast=node("right"), weight=4.0, kind="learner")
        self.heavy_too = Solution(ast=node("shoot"), weight=4.0, kind="learner")
        self.item = Item(id="a", solutions=(self.sample, self.light, self.heavy,
                                            self.heavy_too))

    def test_sample(self):
        assert select_solutions(self.item, "sample") == (self.sample,)

    def test_sample_missing_yields_empty(self):
        item = Item(id="a", solutions=(self.light,))
        assert select_solutions(item, "sample") == ()

    def test_top_learner_takes_heaviest_first_on_ties(self):
        assert select_solutions(self.item, "top_learner") == (self.heavy,)

    def test_all(self):
        assert select_solutions(self.item, "all") == self.item.solutions

    def test_unknown_selector(self):
        with pytest.raises(ItemsimError, match="selector"):
            select_solutions(self.item, "best")


class TestCorpus:
    def test_requires_sorted_unique_ids(self):
        a = Item(id="a", statement_text="x")
        b = Item(id="b", statement_text="y")
        with pytest.raises(ItemsimError, match="sorted"):
            Corpus((b, a))
        with pytest.raises(ItemsimError, match="duplicate"):
            Corpus((a, a))

    def test_lookup(self):
        corpus = make_tiny_corpus()
        assert corpus.item_ids == ("alpha", "beta", "gamma")
        assert len(corpus) == 3
        assert corpus.get("beta").id == "beta"
        with pytest.raises(KeyError):
            corpus.get("zz")


def _write_layout(root):
    (root / "items.json").write_text(json.dumps([
        {"id": "p2", "statement_text": "Second puzzle", "level": 1},
        {"id": "p1", "statement_text": "First puzzle",
         "world": {"grid": ["D."], "legend": {"D": "diamond"}},
         "command_limit": 5, "level": 0},
    ]), encoding="utf-8")
    sol = root / "solutions" / "p1"
    sol.mkdir(parents=True)
    (sol / "sample.robot").write_text("move shoot\n", encoding="utf-8")
    (sol / "b.robot").write_text("move\n", encoding="utf-8")
    (sol / "a.ast.json").write_text('{"label":"walk","children":[]}', encoding="utf-8")
    (sol / "weights.json").write_text('{"a.ast.json": 2.5}', encoding="utf-8")


class TestLoadCorpus:
    def test_loads_items_sorted_with_solutions(self, tmp_path):
        _write_layout(tmp_path)
        corpus = load_corpus(tmp_path)
        assert corpus.item_ids == ("p1", "p2")
        p1 = corpus.get("p1")
        assert p1.statement_text == "First puzzle"
        assert p1.world.concept_counts() == {"diamond": 1}
        assert p1.command_limit == 5
        assert p1.level == 0
        # solution files in filename order; sample* prefix marks the sample
        kinds = [s.kind for s in p1.solutions]
        assert kinds == ["learner", "learner", "sample"]
        assert [s.weight for s in p1.solutions] == [2.5, 1.0, 1.0]
        assert p1.solutions[0].ast == node("walk")
        assert p1.sample_solution().ast == node("program", node("move"), node("shoot"))
        assert corpus.get("p2").solutions == ()

    def test_missing_index(self, tmp_path):
        with pytest.raises(ItemsimError, match="items.json"):
            load_corpus(tmp_path)

    def test_malformed_index(self, tmp_path):
        (tmp_path / "items.json").write_text("{oops", encoding="utf-8")
        with pytest.raises(ItemsimError, match="malformed"):
            load_corpus(tmp_path)

    def test_duplicate_id(self, tmp_path):
        (tmp_path / "items.json").write_text(
            '[{"id": "a", "statement_text": "x"}, {"id": "a", "statement_text": "y"}]',
            encoding="utf-8")
        with pytest.raises(ItemsimError, match="duplicate item id"):
            load_corpus(tmp_path)

    def test_solution_dir_for_unknown_item(self, tmp_path):
        (tmp_path / "items.json").write_text('[{"id": "a", "statement_text": "x"}]',
                                             encoding="utf-8")
        orphan = tmp_path / "solutions" / "zz"
        orphan.mkdir(parents=True)
        (orphan / "sample.robot").write_text("move", encoding="utf-8")
        with pytest.raises(ItemsimError, match="zz"):
            load_corpus(tmp_path)

    def test_unparsable_solution_reports_file_and_position(self, tmp_path):
        (tmp_path / "items.json").write_text('[{"id": "a", "statement_text": "x"}]',
                                             encoding="utf-8")
        sol = tmp_path / "solutions" / "a"
        sol.mkdir(parents=True)
        (sol / "sample.robot").write_text("\nrepeat { move }", encoding="utf-8")
        with pytest.raises(ItemsimError, match=r"sample\.robot.*2:8"):
            load_corpus(tmp_path)

    def test_save_load_round_trip(self, tmp_path):
        from itemsim.tree import ast_to_document

        def key(sol):
            return (sol.kind, sol.weight, ast_to_document(sol.ast))

        corpus = make_tiny_corpus()
        save_corpus(corpus, tmp_path / "out")
        again = load_corpus(tmp_path / "out")
        assert again.item_ids == corpus.item_ids
        for item_id in corpus.item_ids:
            a, b = corpus.get(item_id), again.get(item_id)
            assert a.statement_text == b.statement_text
            assert a.level == b.level
            assert a.command_limit == b.command_limit
            assert (a.world is None) == (b.world is None)
            if a.world is not None:
                assert a.world.grid == b.world.grid
                assert a.world.legend == b.world.legend
            # loading orders solutions by filename, so compare as multisets
            assert sorted(map(key, a.solutions)) == sorted(map(key, b.solutions))

    def test_save_is_byte_deterministic(self, tmp_path):
        corpus = make_tiny_corpus()
        save_corpus(corpus, tmp_path / "one")
        save_corpus(corpus, tmp_path / "two")
        one = sorted(p.relative_to(tmp_path / "one") for p in (tmp_path / "one").rglob("*")
                     if p.is_file())
        two = sorted(p.relative_to(tmp_path / "two") for p in (tmp_path / "two").rglob("*")
                     if p.is_file())
        assert one == two
        for rel in one:
            assert (tmp_path / "one" / rel).read_bytes() == (tmp_path / "two" / rel).read_bytes()

    def test_index_serialization_is_stable(self):
        corpus = make_tiny_corpus()
        assert items_index_json(corpus) == items_index_json(corpus)


PERF_TEXT = """learner_id,item_id,time_seconds,success
l1,alpha,12.5,1
l1,beta,3,0
l2,alpha,7.25,1
"""


class TestPerformance:
    def test_reads_rows_in_order(self, tmp_path):
        path = tmp_path / "performance.csv"
        path.write_text(PERF_TEXT, encoding="utf-8")
        records = load_performance(path)
        assert len(records) == 3
        assert records[0] == PerformanceRecord("l1", "alpha", 12.5, True)
        assert records[1].success is False

    def test_header_must_match_exactly(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("learner,item,time,success\nl,i,1,1\n", encoding="utf-8")
        with pytest.raises(ItemsimError, match="header"):
            load_performance(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ItemsimError, match="empty"):
            load_performance(path)

    def test_nonpositive_time_rejected(self, tmp_path):
        for bad in ("-1", "0", "nan", "inf"):
            path = tmp_path / "p.csv"
            path.write_text(
                f"learner_id,item_id,time_seconds,success\nl,i,{bad},1\n",
                encoding="utf-8")
            with pytest.raises(ItemsimError, match="time"):
                load_performance(path)

    def test_non_numeric_time_rejected(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("learner_id,item_id,time_seconds,success\nl,i,soon,1\n",
                        encoding="utf-8")
        with pytest.raises(ItemsimError, match="non-numeric"):
            load_performance(path)

    def test_success_must_be_binary(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("learner_id,item_id,time_seconds,success\nl,i,1,2\n",
                        encoding="utf-8")
        with pytest.raises(ItemsimError, match="success"):
            load_performance(path)

    def test_duplicates_keep_first_and_are_counted(self, caplog):
        import io
        text = ("learner_id,item_id,time_seconds,success\n"
                "l,i,1,1\nl,i,99,0\nl,j,2,1\n")
        with caplog.at_level(logging.WARNING, logger="itemsim.corpus"):
            records = read_performance(io.StringIO(text))
        assert len(records) == 2
        assert records[0].time_seconds == 1.0
        assert "1 duplicate" in caplog.text

    def test_corpus_cross_check(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("learner_id,item_id,time_seconds,success\nl,zz,1,1\n",
                        encoding="utf-8")
        with pytest.raises(ItemsimError, match="unknown item id"):
            load_performance(path, corpus=make_tiny_corpus())

    def test_csv_round_trip(self, tmp_path):
        records = [
            PerformanceRecord("l1", "alpha", 12.5, True),
            PerformanceRecord("l2", "beta", 0.125, False),
        ]
        path = tmp_path / "performance.csv"
        save_performance(records, path)
        assert load_performance(path) == records
        assert performance_csv(records).endswith("l2,beta,0.125,0\n")
