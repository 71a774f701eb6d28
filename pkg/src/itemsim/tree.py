"""Solution ASTs: the node type, the JSON document format, and the two
sequence views (canonized token stream, flattened action sequence)."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import ItemsimError

DEFAULT_UNROLL_CAP = 100
DEFAULT_TOTAL_CAP = 10000

_REPEAT_RE = re.compile(r"^repeat_([1-9][0-9]*)$")


@dataclass(frozen=True)
class AstNode:
    """Ordered labeled tree. Immutable, hashable."""

    label: str
    children: tuple[AstNode, ...] = ()

    def __post_init__(self):
        if not self.label:
            raise ItemsimError("empty label in AST node")

    def is_leaf(self) -> bool:
        return not self.children


def node(label: str, *children: AstNode) -> AstNode:
    """Shorthand constructor."""
    return AstNode(label, tuple(children))


def node_count(ast: AstNode) -> int:
    return 1 + sum(node_count(c) for c in ast.children)


def max_depth(ast: AstNode) -> int:
    """Depth of the deepest node, root counting as 1."""
    if not ast.children:
        return 1
    return 1 + max(max_depth(c) for c in ast.children)


def iter_labels(ast: AstNode):
    """Preorder label stream (no delimiters)."""
    yield ast.label
    for c in ast.children:
        yield from iter_labels(c)


# ---------------------------------------------------------------------------
# Canonical AST document format: {"label": str, "children": [...]}
# ---------------------------------------------------------------------------


def parse_ast_document(text: str) -> AstNode:
    """Parse the canonical JSON document carrying an externally produced AST.

    The document is an object with exactly the keys "label" (non-empty
    string) and "children" (list of the same shape). Labels are preserved
    byte-exact.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ItemsimError(f"malformed AST document: {e}") from e
    return _node_from_obj(doc)


def _node_from_obj(obj) -> AstNode:
    if not isinstance(obj, dict):
        raise ItemsimError("malformed AST document: node is not an object")
    extra = set(obj) - {"label", "children"}
    if extra:
        raise ItemsimError(f"malformed AST document: unknown keys {sorted(extra)}")
    label = obj.get("label")
    if not isinstance(label, str) or label == "":
        raise ItemsimError("malformed AST document: empty or non-string label")
    children = obj.get("children", [])
    if not isinstance(children, list):
        raise ItemsimError("malformed AST document: children field is not a list")
    return AstNode(label, tuple(_node_from_obj(c) for c in children))


def ast_to_document(ast: AstNode) -> str:
    """Serialize to the canonical document format (deterministic bytes)."""

    def to_obj(n: AstNode):
        return {"label": n.label, "children": [to_obj(c) for c in n.children]}

    return json.dumps(to_obj(ast), ensure_ascii=False, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# Sequence views
# ---------------------------------------------------------------------------


def canonize(ast: AstNode) -> list[str]:
    """Preorder token stream with "(" and ")" delimiting each non-leaf
    node's children. Unambiguous as long as labels avoid the two delimiter
    tokens, hence injective over a fixed label vocabulary.
    """
    out: list[str] = []

    def walk(n: AstNode):
        out.append(n.label)
        if n.children:
            out.append("(")
            for c in n.children:
                walk(c)
            out.append(")")

    walk(ast)
    return out


def _repeat_count(label: str) -> int | None:
    m = _REPEAT_RE.match(label)
    return int(m.group(1)) if m else None


def action_sequence(
    ast: AstNode,
    unroll_cap: int = DEFAULT_UNROLL_CAP,
    total_cap: int = DEFAULT_TOTAL_CAP,
) -> list[str]:
    """Static left-to-right flattening into the leaf commands a program
    would issue.

    Control flow is not executed: `repeat_N` bodies are emitted
    min(N, unroll_cap) times, `while`/`if`/`else` bodies exactly once in
    source order. `def_F` bodies are emitted only at `call_F` sites; a call
    to a function already being expanded is skipped, so recursion
    contributes one level. Output is truncated at total_cap.
    """
    if unroll_cap < 1 or total_cap < 1:
        raise ItemsimError("caps must be >= 1")

    # def_F nodes anywhere in the tree are callable by name F
    defs: dict[str, AstNode] = {}

    def collect(n: AstNode):
        if n.label.startswith("def_") and len(n.label) > 4:
            defs.setdefault(n.label[4:], n)
        for c in n.children:
            collect(c)

    collect(ast)

    out: list[str] = []
    active: set[str] = set()

    def emit_children(n: AstNode):
        for c in n.children:
            if len(out) >= total_cap:
                return
            walk(c)

    def walk(n: AstNode):
        if len(out) >= total_cap:
            return
        label = n.label
        count = _repeat_count(label)
        if count is not None:
            for _ in range(min(count, unroll_cap)):
                if len(out) >= total_cap:
                    return
                emit_children(n)
            return
        if label in ("program", "then", "else"):
            emit_children(n)
            return
        if label.startswith(("while_", "if_")):
            emit_children(n)
            return
        if label.startswith("def_"):
            return  # body contributes at call sites only
        if label.startswith("call_"):
            name = label[5:]
            body = defs.get(name)
            if body is not None and name not in active:
                active.add(name)
                emit_children(body)
                active.discard(name)
            return
        if n.children:
            emit_children(n)
            return
        out.append(label)

    walk(ast)
    return out
