"""Construct-only sketch abstraction of codes.

A sketch keeps the control-flow skeleton of a program and nothing else:
actions disappear, repeat counts become ``X`` and conditions become ``B``
(``RepeatUntil`` keeps its ``goal`` guard). Sketch bodies may be empty.

Text form mirrors the code format; empty bodies may be written ``{}`` or
omitted. Canonical output omits bodies only when every body of a node is
empty, so ``Run``, ``Run{RepeatUntil(goal)}`` and
``Run{RepeatUntil(goal){IfElse(B){}{IfElse(B)}}}`` are all canonical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .code_dsl import (
    Action,
    Blank,
    CodeSyntaxError,
    GrammarError,
    If,
    IfElse,
    Program,
    Repeat,
    RepeatUntil,
    Stmt,
    While,
)
from .treedist import LTree, tree_distance


@dataclass(frozen=True)
class SRepeat:
    body: tuple["SNode", ...]


@dataclass(frozen=True)
class SRepeatUntil:
    body: tuple["SNode", ...]


@dataclass(frozen=True)
class SWhile:
    body: tuple["SNode", ...]


@dataclass(frozen=True)
class SIf:
    body: tuple["SNode", ...]


@dataclass(frozen=True)
class SIfElse:
    then_body: tuple["SNode", ...]
    else_body: tuple["SNode", ...]


SNode = Union[SRepeat, SRepeatUntil, SWhile, SIf, SIfElse]


@dataclass(frozen=True)
class Sketch:
    """A sketch AST: the Run root over construct nodes only."""

    body: tuple[SNode, ...]


_LABELS = {
    SRepeat: "Repeat(X)",
    SRepeatUntil: "RepeatUntil(goal)",
    SWhile: "While(B)",
    SIf: "If(B)",
    SIfElse: "IfElse(B)",
}


def abstract(program: Program) -> Sketch:
    """The many-to-one map from codes to sketches."""

    def conv_body(body: tuple[Stmt, ...]) -> tuple[SNode, ...]:
        out: list[SNode] = []
        for stmt in body:
            if isinstance(stmt, (Action, Blank)):
                continue
            if isinstance(stmt, Repeat):
                out.append(SRepeat(conv_body(stmt.body)))
            elif isinstance(stmt, RepeatUntil):
                out.append(SRepeatUntil(conv_body(stmt.body)))
            elif isinstance(stmt, While):
                out.append(SWhile(conv_body(stmt.body)))
            elif isinstance(stmt, If):
                out.append(SIf(conv_body(stmt.body)))
            elif isinstance(stmt, IfElse):
                out.append(SIfElse(conv_body(stmt.then_body), conv_body(stmt.else_body)))
        return tuple(out)

    return Sketch(conv_body(program.body))


def _serialize_node(node: SNode) -> str:
    label = type(node).__name__
    if isinstance(node, SIfElse):
        if not node.then_body and not node.else_body:
            return "IfElse(B)"
        return (
            f"IfElse(B){{{_serialize_body(node.then_body)}}}"
            f"{{{_serialize_body(node.else_body)}}}"
        )
    head = _LABELS[type(node)]
    if not node.body:
        return head
    return f"{head}{{{_serialize_body(node.body)}}}"


def _serialize_body(body: tuple[SNode, ...]) -> str:
    return ";".join(_serialize_node(n) for n in body)


def serialize_sketch(sketch: Sketch) -> str:
    if not sketch.body:
        return "Run"
    return f"Run{{{_serialize_body(sketch.body)}}}"


_SK_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[{}();]")


class _SketchParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, int]] = []
        pos = 0
        for m in _SK_TOKEN_RE.finditer(text):
            gap = text[pos:m.start()]
            if gap.strip():
                raise CodeSyntaxError(f"unexpected character {gap.strip()[0]!r}", pos)
            self.tokens.append((m.group(), m.start()))
            pos = m.end()
        if text[pos:].strip():
            raise CodeSyntaxError(f"unexpected character {text[pos:].strip()[0]!r}", pos)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self) -> str:
        if self.i >= len(self.tokens):
            raise CodeSyntaxError("unexpected end of input", len(self.text))
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.peek()
        if got != tok:
            raise CodeSyntaxError(f"expected {tok!r}, found {got!r}", self.pos())
        self.i += 1


def _sk_parse_body(p: _SketchParser) -> tuple[SNode, ...]:
    """Parse an optional braced body; absent or `{}` means empty."""
    if p.peek() != "{":
        return ()
    p.take()
    nodes: list[SNode] = []
    if p.peek() != "}":
        nodes.append(_sk_parse_node(p))
        while p.peek() == ";":
            p.take()
            nodes.append(_sk_parse_node(p))
    p.expect("}")
    return tuple(nodes)


def _sk_parse_node(p: _SketchParser) -> SNode:
    pos = p.pos()
    tok = p.take()
    if tok == "Repeat":
        p.expect("(")
        if p.take() != "X":
            raise CodeSyntaxError("sketch Repeat takes the placeholder X", pos)
        p.expect(")")
        return SRepeat(_sk_parse_body(p))
    if tok == "RepeatUntil":
        p.expect("(")
        if p.take() != "goal":
            raise CodeSyntaxError("RepeatUntil guard must be goal", pos)
        p.expect(")")
        return SRepeatUntil(_sk_parse_body(p))
    if tok in ("While", "If", "IfElse"):
        p.expect("(")
        if p.take() != "B":
            raise CodeSyntaxError(f"sketch {tok} takes the placeholder B", pos)
        p.expect(")")
        if tok == "While":
            return SWhile(_sk_parse_body(p))
        if tok == "If":
            return SIf(_sk_parse_body(p))
        then_body = _sk_parse_body(p)
        else_body = _sk_parse_body(p)
        return SIfElse(then_body, else_body)
    raise CodeSyntaxError(f"unknown sketch construct {tok!r}", pos)


def parse_sketch(text: str) -> Sketch:
    p = _SketchParser(text)
    first = p.take()
    if first != "Run":
        raise CodeSyntaxError(f"sketch must start with Run, found {first!r}", 0)
    body = _sk_parse_body(p)
    if p.i < len(p.tokens):
        raise CodeSyntaxError(f"trailing input {p.peek()!r}", p.pos())
    sketch = Sketch(body)
    validate_sketch(sketch)
    return sketch


def iter_sketch_nodes(sketch: Sketch) -> Iterator[tuple[tuple[int, ...], SNode]]:
    def walk(body: tuple[SNode, ...], path: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], SNode]]:
        for i, node in enumerate(body):
            here = path + (i,)
            yield here, node
            if isinstance(node, SIfElse):
                yield from walk(node.then_body, here + (0,))
                yield from walk(node.else_body, here + (1,))
            else:
                yield from walk(node.body, here)

    yield from walk(sketch.body, ())


def validate_sketch(sketch: Sketch) -> None:
    """RepeatUntil may appear once, only as the final top-level node."""
    seen_until = False
    for path, node in iter_sketch_nodes(sketch):
        if isinstance(node, SRepeatUntil):
            if seen_until:
                raise GrammarError("more than one RepeatUntil")
            if len(path) != 1 or path[0] != len(sketch.body) - 1:
                raise GrammarError("RepeatUntil must be the final top-level node")
            seen_until = True


def to_ltree(sketch: Sketch) -> LTree:
    def conv(node: SNode) -> LTree:
        if isinstance(node, SIfElse):
            kids = tuple(conv(n) for n in node.then_body) + tuple(conv(n) for n in node.else_body)
            return LTree("IfElse(B)", kids)
        return LTree(_LABELS[type(node)], tuple(conv(n) for n in node.body))

    return LTree("Run", tuple(conv(n) for n in sketch.body))


def sketch_distance(s1: Sketch, s2: Sketch) -> int:
    """Ordered tree edit distance over construct nodes, all edits cost 1."""
    return tree_distance(to_ltree(s1), to_ltree(s2))


def levels(sketch: Sketch) -> int:
    """Number of tree levels including Run; equals 1 for the bare sketch."""

    def walk(body: tuple[SNode, ...]) -> int:
        deepest = 0
        for node in body:
            if isinstance(node, SIfElse):
                below = max(walk(node.then_body), walk(node.else_body))
            else:
                below = walk(node.body)
            deepest = max(deepest, 1 + below)
        return deepest

    return 1 + walk(sketch.body)


def truncate(sketch: Sketch, keep_levels: int) -> Sketch:
    """Keep nodes on the first ``keep_levels`` levels (Run is level 1)."""

    def cut(body: tuple[SNode, ...], level: int) -> tuple[SNode, ...]:
        if level > keep_levels:
            return ()
        out: list[SNode] = []
        for node in body:
            if isinstance(node, SIfElse):
                out.append(SIfElse(cut(node.then_body, level + 1), cut(node.else_body, level + 1)))
            elif isinstance(node, SRepeat):
                out.append(SRepeat(cut(node.body, level + 1)))
            elif isinstance(node, SRepeatUntil):
                out.append(SRepeatUntil(cut(node.body, level + 1)))
            elif isinstance(node, SWhile):
                out.append(SWhile(cut(node.body, level + 1)))
            elif isinstance(node, SIf):
                out.append(SIf(cut(node.body, level + 1)))
        return tuple(out)

    return Sketch(cut(sketch.body, 2))


def substructures(sketch: Sketch) -> list[Sketch]:
    """Depth truncations of a sketch, shallowest first, ending at the sketch.

    The list always starts with the bare Run sketch and has exactly
    ``levels(sketch)`` entries.
    """
    return [truncate(sketch, k) for k in range(1, levels(sketch) + 1)]


def one_hop_neighbors(sketch: Sketch, allow_while: bool = True, allow_until: bool = True) -> list[Sketch]:
    """All valid sketches one tree edit away from ``sketch``.

    Edits are the usual tree operations: relabel one construct, delete one
    construct (splicing its children up), or insert one construct over a
    contiguous run of siblings. The flags restrict which construct kinds
    may be introduced (While is Karel-only, RepeatUntil is maze-only).
    """
    kinds: list[str] = ["Repeat", "If", "IfElse"]
    if allow_while:
        kinds.append("While")

    factories = {
        "Repeat": SRepeat,
        "RepeatUntil": SRepeatUntil,
        "While": SWhile,
        "If": SIf,
    }
    kind_names = {SRepeat: "Repeat", SRepeatUntil: "RepeatUntil", SWhile: "While", SIf: "If", SIfElse: "IfElse"}

    def make(kind: str, body: tuple[SNode, ...]) -> SNode:
        if kind == "IfElse":
            return SIfElse(body, ())
        return factories[kind](body)

    def rebuild(node: SNode, body: tuple[SNode, ...]) -> SNode:
        if isinstance(node, SIfElse):
            raise TypeError("IfElse bodies are rebuilt separately")
        return factories[kind_names[type(node)]](body)

    def rewrite(body: tuple[SNode, ...], top_level: bool) -> list[tuple[SNode, ...]]:
        out: list[tuple[SNode, ...]] = []
        edit_kinds = list(kinds)
        if top_level and allow_until:
            edit_kinds.append("RepeatUntil")
        # insert a new node wrapping each contiguous (possibly empty) span
        for kind in edit_kinds:
            for lo in range(len(body) + 1):
                for hi in range(lo, len(body) + 1):
                    out.append(body[:lo] + (make(kind, body[lo:hi]),) + body[hi:])
        for i, node in enumerate(body):
            # delete this node, splicing children into place
            if isinstance(node, SIfElse):
                children: tuple[SNode, ...] = node.then_body + node.else_body
            else:
                children = node.body
            out.append(body[:i] + children + body[i + 1:])
            # relabel this node
            for kind in edit_kinds:
                if kind != kind_names[type(node)]:
                    out.append(body[:i] + (make(kind, children),) + body[i + 1:])
            # recurse into a child body
            if isinstance(node, SIfElse):
                for new_then in rewrite(node.then_body, False):
                    out.append(body[:i] + (SIfElse(new_then, node.else_body),) + body[i + 1:])
                for new_else in rewrite(node.else_body, False):
                    out.append(body[:i] + (SIfElse(node.then_body, new_else),) + body[i + 1:])
            else:
                for new_body in rewrite(node.body, False):
                    out.append(body[:i] + (rebuild(node, new_body),) + body[i + 1:])
        return out

    seen: set[Sketch] = set()
    neighbors: list[Sketch] = []
    for body in rewrite(sketch.body, True):
        candidate = Sketch(body)
        if candidate == sketch or candidate in seen:
            continue
        try:
            validate_sketch(candidate)
        except GrammarError:
            continue
        if sketch_distance(sketch, candidate) != 1:
            continue
        seen.add(candidate)
        neighbors.append(candidate)
    return neighbors
