"""AST types, grammar checks, text round-trip and metrics for the block DSL.

Programs are small rooted trees: a ``Run`` root holding a sequence of
action and control-flow statements. The concrete text form is compact:

    Run{RepeatUntil(goal){IfElse(pathAhead){move}{turnLeft}}}

Whitespace between tokens is ignored on input and never emitted on output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .treedist import LTree, tree_distance

ACTIONS = ("move", "turnLeft", "turnRight", "pickMarker", "putMarker")
HOC_ACTIONS = ("move", "turnLeft", "turnRight")
KAREL_ACTIONS = ACTIONS
CONSTRUCTS = ("Repeat", "RepeatUntil", "While", "If", "IfElse")

CONDITIONS = (
    "pathAhead",
    "pathLeft",
    "pathRight",
    "noPathAhead",
    "markersPresent",
    "noMarkersPresent",
)
PATH_CONDITIONS = ("pathAhead", "pathLeft", "pathRight", "noPathAhead")
MARKER_CONDITIONS = ("markersPresent", "noMarkersPresent")

HOC_STORE = frozenset(HOC_ACTIONS) | {"Repeat", "RepeatUntil", "If", "IfElse"}
KAREL_STORE = frozenset(KAREL_ACTIONS) | {"Repeat", "While", "If", "IfElse"}

REPEAT_MIN = 2
REPEAT_MAX = 10
BLANK_TOKEN = "__blank__"


class DslError(Exception):
    """Base class for DSL parsing and validation failures."""


class CodeSyntaxError(DslError):
    """Malformed program text; carries the character offset of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class GrammarError(DslError):
    """Structurally well-formed text that violates the block grammar."""


@dataclass(frozen=True)
class Action:
    kind: str


@dataclass(frozen=True)
class Blank:
    pass


@dataclass(frozen=True)
class Repeat:
    count: int
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class RepeatUntil:
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class While:
    cond: str
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class If:
    cond: str
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class IfElse:
    cond: str
    then_body: tuple["Stmt", ...]
    else_body: tuple["Stmt", ...]


Stmt = Union[Action, Blank, Repeat, RepeatUntil, While, If, IfElse]


@dataclass(frozen=True)
class Program:
    """A full code AST: the Run root with its statement sequence."""

    body: tuple[Stmt, ...]


@dataclass(frozen=True)
class CodeMetrics:
    blocks: frozenset[str]
    size: int
    depth: int


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+|[{}();]")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, int]] = []
        pos = 0
        for m in _TOKEN_RE.finditer(text):
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

    def done(self) -> bool:
        return self.i >= len(self.tokens)


def _parse_stmts(p: _Parser) -> tuple[Stmt, ...]:
    stmts = [_parse_stmt(p)]
    while p.peek() == ";":
        p.take()
        stmts.append(_parse_stmt(p))
    return tuple(stmts)


def _parse_block(p: _Parser) -> tuple[Stmt, ...]:
    p.expect("{")
    if p.peek() == "}":
        pos = p.pos()
        p.take()
        raise GrammarError(f"empty body at offset {pos}")
    stmts = _parse_stmts(p)
    p.expect("}")
    return stmts


def _parse_cond(p: _Parser) -> str:
    p.expect("(")
    tok = p.take()
    if tok not in CONDITIONS:
        raise CodeSyntaxError(f"unknown condition {tok!r}", p.pos())
    p.expect(")")
    return tok


def _parse_stmt(p: _Parser) -> Stmt:
    pos = p.pos()
    tok = p.take()
    if tok in ACTIONS:
        return Action(tok)
    if tok == BLANK_TOKEN:
        return Blank()
    if tok == "Repeat":
        p.expect("(")
        count_tok = p.take()
        if not count_tok.isdigit():
            raise CodeSyntaxError(f"expected repeat count, found {count_tok!r}", pos)
        p.expect(")")
        return Repeat(int(count_tok), _parse_block(p))
    if tok == "RepeatUntil":
        p.expect("(")
        guard = p.take()
        if guard != "goal":
            raise CodeSyntaxError(f"RepeatUntil guard must be goal, found {guard!r}", pos)
        p.expect(")")
        return RepeatUntil(_parse_block(p))
    if tok == "While":
        return While(_parse_cond(p), _parse_block(p))
    if tok == "If":
        return If(_parse_cond(p), _parse_block(p))
    if tok == "IfElse":
        cond = _parse_cond(p)
        then_body = _parse_block(p)
        else_body = _parse_block(p)
        return IfElse(cond, then_body, else_body)
    raise CodeSyntaxError(f"unknown statement {tok!r}", pos)


def parse(text: str, allow_blank: bool = False) -> Program:
    """Parse program text, validating the grammar.

    ``allow_blank`` admits a single ``__blank__`` leaf (quiz codes only).
    """
    p = _Parser(text)
    first = p.take()
    if first != "Run":
        raise CodeSyntaxError(f"program must start with Run, found {first!r}", 0)
    body = _parse_block(p)
    if not p.done():
        raise CodeSyntaxError(f"trailing input {p.peek()!r}", p.pos())
    program = Program(body)
    validate(program, allow_blank=allow_blank)
    return program


def _serialize_stmt(stmt: Stmt) -> str:
    if isinstance(stmt, Action):
        return stmt.kind
    if isinstance(stmt, Blank):
        return BLANK_TOKEN
    if isinstance(stmt, Repeat):
        return f"Repeat({stmt.count}){{{_serialize_body(stmt.body)}}}"
    if isinstance(stmt, RepeatUntil):
        return f"RepeatUntil(goal){{{_serialize_body(stmt.body)}}}"
    if isinstance(stmt, While):
        return f"While({stmt.cond}){{{_serialize_body(stmt.body)}}}"
    if isinstance(stmt, If):
        return f"If({stmt.cond}){{{_serialize_body(stmt.body)}}}"
    if isinstance(stmt, IfElse):
        return (
            f"IfElse({stmt.cond})"
            f"{{{_serialize_body(stmt.then_body)}}}"
            f"{{{_serialize_body(stmt.else_body)}}}"
        )
    raise TypeError(f"not a statement: {stmt!r}")


def _serialize_body(body: tuple[Stmt, ...]) -> str:
    return ";".join(_serialize_stmt(s) for s in body)


def serialize(program: Program) -> str:
    """Render a program in canonical text form (round-trips through parse)."""
    return f"Run{{{_serialize_body(program.body)}}}"


def _iter_body(body: tuple[Stmt, ...], path: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], Stmt]]:
    for i, stmt in enumerate(body):
        here = path + (i,)
        yield here, stmt
        if isinstance(stmt, (Repeat, RepeatUntil, While, If)):
            yield from _iter_body(stmt.body, here)
        elif isinstance(stmt, IfElse):
            yield from _iter_body(stmt.then_body, here + (0,))
            yield from _iter_body(stmt.else_body, here + (1,))


def iter_nodes(program: Program) -> Iterator[tuple[tuple[int, ...], Stmt]]:
    """Yield (path, node) pairs in left-to-right depth-first order.

    Paths are child-index tuples below Run; for IfElse the then branch is
    addressed under an extra 0 component and the else branch under a 1.
    """
    yield from _iter_body(program.body, ())


def validate(program: Program, allow_blank: bool = False) -> None:
    """Raise GrammarError unless the AST satisfies the block grammar."""
    if not program.body:
        raise GrammarError("Run body is empty")
    blanks = 0
    for i, (path, node) in enumerate(iter_nodes(program)):
        if isinstance(node, Blank):
            if not allow_blank:
                raise GrammarError("blank leaf outside quiz mode")
            blanks += 1
            if blanks > 1:
                raise GrammarError("more than one blank leaf")
        elif isinstance(node, Repeat):
            if not (REPEAT_MIN <= node.count <= REPEAT_MAX):
                raise GrammarError(f"repeat count {node.count} outside [{REPEAT_MIN},{REPEAT_MAX}]")
            if not node.body:
                raise GrammarError("empty Repeat body")
        elif isinstance(node, RepeatUntil):
            if len(path) != 1 or path[0] != len(program.body) - 1:
                raise GrammarError("RepeatUntil must be the final top-level statement")
            if not node.body:
                raise GrammarError("empty RepeatUntil body")
        elif isinstance(node, (While, If)):
            if not node.body:
                raise GrammarError(f"empty {type(node).__name__} body")
        elif isinstance(node, IfElse):
            if not node.then_body or not node.else_body:
                raise GrammarError("empty IfElse branch")


def metrics(program: Program) -> CodeMetrics:
    """Block set, block count (Run excluded) and AST depth (Run at 0)."""
    blocks: set[str] = set()
    size = 0
    for _, node in iter_nodes(program):
        if isinstance(node, Action):
            blocks.add(node.kind)
            size += 1
        elif isinstance(node, Blank):
            continue
        else:
            blocks.add(type(node).__name__)
            size += 1
    return CodeMetrics(blocks=frozenset(blocks), size=size, depth=_depth_of(program.body, 1))


def _depth_of(body: tuple[Stmt, ...], level: int) -> int:
    deepest = 0
    for stmt in body:
        if isinstance(stmt, (Action, Blank)):
            deepest = max(deepest, level)
        elif isinstance(stmt, (Repeat, RepeatUntil, While, If)):
            deepest = max(deepest, level, _depth_of(stmt.body, level + 1))
        elif isinstance(stmt, IfElse):
            deepest = max(
                deepest,
                level,
                _depth_of(stmt.then_body, level + 1),
                _depth_of(stmt.else_body, level + 1),
            )
    return deepest


def to_ltree(program: Program) -> LTree:
    """Labeled ordered tree used by the edit-distance metric."""

    def conv(stmt: Stmt) -> LTree:
        if isinstance(stmt, Action):
            return LTree(stmt.kind)
        if isinstance(stmt, Blank):
            return LTree(BLANK_TOKEN)
        if isinstance(stmt, Repeat):
            return LTree(f"Repeat({stmt.count})", tuple(conv(s) for s in stmt.body))
        if isinstance(stmt, RepeatUntil):
            return LTree("RepeatUntil(goal)", tuple(conv(s) for s in stmt.body))
        if isinstance(stmt, While):
            return LTree(f"While({stmt.cond})", tuple(conv(s) for s in stmt.body))
        if isinstance(stmt, If):
            return LTree(f"If({stmt.cond})", tuple(conv(s) for s in stmt.body))
        if isinstance(stmt, IfElse):
            kids = tuple(conv(s) for s in stmt.then_body) + tuple(conv(s) for s in stmt.else_body)
            return LTree(f"IfElse({stmt.cond})", kids)
        raise TypeError(f"not a statement: {stmt!r}")

    return LTree("Run", tuple(conv(s) for s in program.body))


def code_distance(c1: Program, c2: Program) -> int:
    """Ordered tree edit distance between two codes, all edits cost 1."""
    return tree_distance(to_ltree(c1), to_ltree(c2))
