"""Code reductions: all smaller codes reachable by node removals.

A single removal step deletes one action, deletes a construct together
with its subtree, or deletes a construct while splicing exactly one of
its bodies into the surrounding sequence. The reduction set of a code
with respect to a target sketch is the closure of such steps restricted
to grammar-valid codes whose sketch equals the target; the code itself
is never a member.
"""

from __future__ import annotations

from .code_dsl import (
    GrammarError,
    If,
    IfElse,
    Program,
    Repeat,
    RepeatUntil,
    Stmt,
    While,
    validate,
)
from .sketch import Sketch, abstract, substructures


class InvalidTarget(Exception):
    """The requested sketch is not a substructure of the code's sketch."""


def _body_removals(body: tuple[Stmt, ...]) -> list[tuple[Stmt, ...]]:
    """All bodies one removal step away from ``body``."""
    out: list[tuple[Stmt, ...]] = []
    for i, stmt in enumerate(body):
        rest = body[:i], body[i + 1:]
        # drop the statement (with its whole subtree, for constructs)
        out.append(rest[0] + rest[1])
        # drop a construct but keep one of its bodies in place
        if isinstance(stmt, (Repeat, RepeatUntil, While, If)):
            out.append(rest[0] + stmt.body + rest[1])
        elif isinstance(stmt, IfElse):
            out.append(rest[0] + stmt.then_body + rest[1])
            out.append(rest[0] + stmt.else_body + rest[1])
        # or recurse into the statement
        if isinstance(stmt, Repeat):
            out.extend(rest[0] + (Repeat(stmt.count, b),) + rest[1] for b in _body_removals(stmt.body))
        elif isinstance(stmt, RepeatUntil):
            out.extend(rest[0] + (RepeatUntil(b),) + rest[1] for b in _body_removals(stmt.body))
        elif isinstance(stmt, While):
            out.extend(rest[0] + (While(stmt.cond, b),) + rest[1] for b in _body_removals(stmt.body))
        elif isinstance(stmt, If):
            out.extend(rest[0] + (If(stmt.cond, b),) + rest[1] for b in _body_removals(stmt.body))
        elif isinstance(stmt, IfElse):
            out.extend(
                rest[0] + (IfElse(stmt.cond, b, stmt.else_body),) + rest[1]
                for b in _body_removals(stmt.then_body)
            )
            out.extend(
                rest[0] + (IfElse(stmt.cond, stmt.then_body, b),) + rest[1]
                for b in _body_removals(stmt.else_body)
            )
    return out


def removal_steps(code: Program) -> list[Program]:
    """Grammar-valid codes exactly one removal step away from ``code``."""
    out: list[Program] = []
    seen: set[Program] = set()
    for body in _body_removals(code.body):
        candidate = Program(body)
        if candidate in seen:
            continue
        seen.add(candidate)
        try:
            validate(candidate)
        except GrammarError:
            continue
        out.append(candidate)
    return out


def red_codes(code: Program, target: Sketch) -> set[Program]:
    """All reductions of ``code`` whose sketch equals ``target``.

    Raises InvalidTarget unless ``target`` is a substructure of the
    code's own sketch (callers that merely probe should check membership
    with ``sketch.substructures`` first).
    """
    if target not in substructures(abstract(code)):
        raise InvalidTarget("target sketch is not a substructure of the code's sketch")
    results: set[Program] = set()
    seen: set[Program] = {code}
    frontier = [code]
    while frontier:
        nxt: list[Program] = []
        for current in frontier:
            for reduced in removal_steps(current):
                if reduced in seen:
                    continue
                seen.add(reduced)
                nxt.append(reduced)
                if abstract(reduced) == target:
                    results.add(reduced)
        frontier = nxt
    return results
