"""Item corpus: data model, directory layout ingestion, performance logs.

Corpus directory layout:

    items.json                      array of {id, statement_text?, world?,
                                    command_limit?, level?}
    solutions/<item_id>/<name>.robot     robot DSL source
    solutions/<item_id>/<name>.ast.json  canonical AST document
    solutions/<item_id>/weights.json     optional {filename: weight}
    performance.csv                 optional log (see load_performance)

Solution files whose basename starts with "sample" carry the author's
sample solution; all other files are learner solutions. Weights default
to 1. Solutions are ordered by filename within an item.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ItemsimError
from .robot import parse_robot_program
from .tree import AstNode, ast_to_document, parse_ast_document

log = logging.getLogger("itemsim.corpus")

_ID_RE = re.compile(r"[A-Za-z0-9_-]+$")

BLANK_CELLS = (" ", ".")

PERFORMANCE_HEADER = ("learner_id", "item_id", "time_seconds", "success")


@dataclass(frozen=True)
class WorldSpec:
    """Grid world: rows of single-character cell codes plus a legend
    mapping each non-blank code to a concept name."""

    grid: tuple[str, ...]
    legend: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.grid:
            width = len(self.grid[0])
            if any(len(row) != width for row in self.grid):
                raise ItemsimError("world grid rows have unequal lengths")
        for row in self.grid:
            for cell in row:
                if cell not in BLANK_CELLS and cell not in self.legend:
                    raise ItemsimError(f"world cell code {cell!r} missing from legend")

    @property
    def rows(self) -> int:
        return len(self.grid)

    @property
    def cols(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    def concept_counts(self) -> dict[str, int]:
        """Cell counts per concept name (codes sharing a concept are summed)."""
        counts = {name: 0 for name in self.legend.values()}
        for row in self.grid:
            for cell in row:
                if cell not in BLANK_CELLS:
                    counts[self.legend[cell]] += 1
        return counts


@dataclass(frozen=True)
class Solution:
    ast: AstNode
    weight: float = 1.0
    kind: str = "sample"  # sample | learner

    def __post_init__(self):
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise ItemsimError("solution weight must be finite and positive")
        if self.kind not in ("sample", "learner"):
            raise ItemsimError(f"unknown solution kind {self.kind!r}")


@dataclass(frozen=True)
class Item:
    id: str
    statement_text: str | None = None
    world: WorldSpec | None = None
    command_limit: int | None = None
    solutions: tuple[Solution, ...] = ()
    level: int | None = None

    def __post_init__(self):
        if not _ID_RE.fullmatch(self.id):
            raise ItemsimError(f"invalid item id {self.id!r}")
        if self.statement_text is None and self.world is None and not self.solutions:
            raise ItemsimError(f"item {self.id!r} has no statement, world, or solutions")
        if self.command_limit is not None and self.command_limit < 1:
            raise ItemsimError(f"item {self.id!r}: command_limit must be positive")

    def sample_solution(self) -> Solution | None:
        for s in self.solutions:
            if s.kind == "sample":
                return s
        return None

    def learner_solutions(self) -> tuple[Solution, ...]:
        return tuple(s for s in self.solutions if s.kind == "learner")


def select_solutions(item: Item, selector: str) -> tuple[Solution, ...]:
    """Pick an item's solutions: the sample, the heaviest learner solution
    (first on ties), or all of them."""
    if selector == "sample":
        sol = item.sample_solution()
        return (sol,) if sol is not None else ()
    if selector == "top_learner":
        learners = item.learner_solutions()
        if not learners:
            return ()
        return (max(learners, key=lambda s: s.weight),)
    if selector == "all":
        return item.solutions
    raise ItemsimError(f"unknown solution selector {selector!r}")


@dataclass(frozen=True)
class Corpus:
    """Items sorted by id, ids unique."""

    items: tuple[Item, ...]

    def __post_init__(self):
        ids = [it.id for it in self.items]
        if ids != sorted(ids):
            raise ItemsimError("corpus items must be sorted by id")
        seen = set()
        for i in ids:
            if i in seen:
                raise ItemsimError(f"duplicate item id {i!r}")
            seen.add(i)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(it.id for it in self.items)

    def get(self, item_id: str) -> Item:
        for it in self.items:
            if it.id == item_id:
                return it
        raise KeyError(item_id)


@dataclass(frozen=True)
class PerformanceRecord:
    learner_id: str
    item_id: str
    time_seconds: float
    success: bool

    def __post_init__(self):
        if not self.learner_id:
            raise ItemsimError("empty learner_id")
        if not (math.isfinite(self.time_seconds) and self.time_seconds > 0):
            raise ItemsimError(
                f"time_seconds must be finite and positive, got {self.time_seconds!r}"
            )


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def _world_from_obj(obj, item_id: str) -> WorldSpec:
    if not isinstance(obj, dict) or not isinstance(obj.get("grid"), list):
        raise ItemsimError(f"item {item_id!r}: world must be an object with a grid list")
    legend = obj.get("legend", {})
    if not isinstance(legend, dict):
        raise ItemsimError(f"item {item_id!r}: world legend must be an object")
    return WorldSpec(grid=tuple(obj["grid"]), legend=dict(legend))


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus directory. Items come back sorted by id; solution
    files are parsed by extension (.robot source, .ast.json document)."""
    root = Path(path)
    index_path = root / "items.json"
    if not index_path.is_file():
        raise ItemsimError(f"missing items.json in {root}")
    try:
        index = json.loads(index_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ItemsimError(f"{index_path}: malformed JSON: {e}") from e
    if not isinstance(index, list):
        raise ItemsimError(f"{index_path}: expected a JSON array")

    entries: dict[str, dict] = {}
    for obj in index:
        if not isinstance(obj, dict) or "id" not in obj:
            raise ItemsimError(f"{index_path}: every entry needs an 'id' field")
        item_id = obj["id"]
        if item_id in entries:
            raise ItemsimError(f"duplicate item id {item_id!r} in items.json")
        entries[item_id] = obj

    solutions_root = root / "solutions"
    if solutions_root.is_dir():
        for sol_dir in sorted(solutions_root.iterdir()):
            if sol_dir.is_dir() and sol_dir.name not in entries:
                raise ItemsimError(
                    f"solutions directory {sol_dir.name!r} has no matching item in items.json"
                )

    items = []
    for item_id in sorted(entries):
        obj = entries[item_id]
        world = _world_from_obj(obj["world"], item_id) if obj.get("world") is not None else None
        solutions = _load_solutions(solutions_root / item_id)
        items.append(
            Item(
                id=item_id,
                statement_text=obj.get("statement_text"),
                world=world,
                command_limit=obj.get("command_limit"),
                solutions=solutions,
                level=obj.get("level"),
            )
        )
    return Corpus(tuple(items))


def _load_solutions(sol_dir: Path) -> tuple[Solution, ...]:
    if not sol_dir.is_dir():
        return ()
    weights = {}
    weights_path = sol_dir / "weights.json"
    if weights_path.is_file():
        weights = json.loads(weights_path.read_text(encoding="utf-8"))
        if not isinstance(weights, dict):
            raise ItemsimError(f"{weights_path}: expected an object")
    solutions = []
    for path in sorted(sol_dir.iterdir()):
        if path.name == "weights.json" or not path.is_file():
            continue
        text = path.read_text(encoding="utf-8")
        try:
            if path.name.endswith(".ast.json"):
                ast = parse_ast_document(text)
            elif path.suffix == ".robot":
                ast = parse_robot_program(text)
            else:
                continue
        except ItemsimError as e:
            raise ItemsimError(f"{path}: {e}") from e
        kind = "sample" if path.name.split(".")[0].startswith("sample") else "learner"
        solutions.append(Solution(ast=ast, weight=float(weights.get(path.name, 1.0)), kind=kind))
    return tuple(solutions)


def load_performance(path: str | Path, corpus: Corpus | None = None) -> list[PerformanceRecord]:
    """Load performance.csv. Duplicate (learner, item) rows keep the first
    occurrence; the dropped count is logged. When a corpus is given, item
    ids are cross-checked against it."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        return read_performance(fh, corpus=corpus, source=str(path))


def read_performance(fh, corpus: Corpus | None = None, source: str = "performance.csv"):
    reader = csv.reader(fh)
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise ItemsimError(f"{source}: empty file") from None
    if header != PERFORMANCE_HEADER:
        raise ItemsimError(
            f"{source}: expected header {','.join(PERFORMANCE_HEADER)!r}, got {','.join(header)!r}"
        )
    known = set(corpus.item_ids) if corpus is not None else None
    records = []
    seen: set[tuple[str, str]] = set()
    dropped = 0
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 4:
            raise ItemsimError(f"{source}:{lineno}: expected 4 columns, got {len(row)}")
        learner_id, item_id, time_text, success_text = row
        try:
            time_seconds = float(time_text)
        except ValueError:
            raise ItemsimError(f"{source}:{lineno}: non-numeric time {time_text!r}") from None
        if not (math.isfinite(time_seconds) and time_seconds > 0):
            raise ItemsimError(f"{source}:{lineno}: non-positive time {time_text!r}")
        if success_text not in ("0", "1"):
            raise ItemsimError(f"{source}:{lineno}: success must be 0 or 1, got {success_text!r}")
        if known is not None and item_id not in known:
            raise ItemsimError(f"{source}:{lineno}: unknown item id {item_id!r}")
        key = (learner_id, item_id)
        if key in seen:
            dropped += 1
            continue
        seen.add(key)
        records.append(
            PerformanceRecord(
                learner_id=learner_id,
                item_id=item_id,
                time_seconds=time_seconds,
                success=success_text == "1",
            )
        )
    if dropped:
        log.warning("%s: dropped %d duplicate (learner, item) rows, first kept", source, dropped)
    return records


# ---------------------------------------------------------------------------
# Saving (canonical, byte-deterministic)
# ---------------------------------------------------------------------------


def items_index_json(corpus: Corpus) -> str:
    out = []
    for it in corpus.items:
        obj: dict = {"id": it.id}
        if it.statement_text is not None:
            obj["statement_text"] = it.statement_text
        if it.world is not None:
            obj["world"] = {"grid": list(it.world.grid), "legend": dict(sorted(it.world.legend.items()))}
        if it.command_limit is not None:
            obj["command_limit"] = it.command_limit
        if it.level is not None:
            obj["level"] = it.level
        out.append(obj)
    return json.dumps(out, ensure_ascii=False, indent=2) + "\n"


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the standard directory layout. Robot-fragment solutions are
    emitted as .robot source, everything else as .ast.json documents."""
    from .robot import pretty_print  # local import to avoid cycle at module load

    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    (root / "items.json").write_text(items_index_json(corpus), encoding="utf-8")
    for it in corpus.items:
        if not it.solutions:
            continue
        sol_dir = root / "solutions" / it.id
        sol_dir.mkdir(parents=True, exist_ok=True)
        weights = {}
        counters = {"sample": 0, "learner": 0}
        for sol in it.solutions:
            counters[sol.kind] += 1
            stem = sol.kind if counters[sol.kind] == 1 else f"{sol.kind}_{counters[sol.kind]}"
            try:
                text = pretty_print(sol.ast)
                name = stem + ".robot"
            except ItemsimError:
                text = ast_to_document(sol.ast)
                name = stem + ".ast.json"
            (sol_dir / name).write_text(text, encoding="utf-8")
            if sol.weight != 1.0:
                weights[name] = sol.weight
        if weights:
            (sol_dir / "weights.json").write_text(
                json.dumps(weights, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )


def performance_csv(records: list[PerformanceRecord]) -> str:
    buf = io.StringIO()
    buf.write(",".join(PERFORMANCE_HEADER) + "\n")
    for r in records:
        buf.write(f"{r.learner_id},{r.item_id},{r.time_seconds:.9g},{int(r.success)}\n")
    return buf.getvalue()


def save_performance(records: list[PerformanceRecord], path: str | Path) -> None:
    Path(path).write_text(performance_csv(records), encoding="utf-8")
