"""Bounded exhaustive enumeration of grammar-valid codes over a store.

Used by the optional minimality pass of task synthesis and handy in
tests. The space grows very quickly; callers should keep ``max_size``
small (the minimality pass is documented as feasible only up to 6).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from .code_dsl import (
    ACTIONS,
    Action,
    If,
    IfElse,
    MARKER_CONDITIONS,
    PATH_CONDITIONS,
    Program,
    REPEAT_MAX,
    REPEAT_MIN,
    Repeat,
    RepeatUntil,
    Stmt,
    While,
)


def enumerate_codes(store: frozenset[str], max_size: int, kind: str) -> Iterator[Program]:
    """Yield every valid code using only ``store`` blocks, size <= max_size."""
    actions = tuple(a for a in ACTIONS if a in store)
    conditions = tuple(PATH_CONDITIONS) + (
        tuple(MARKER_CONDITIONS) if kind == "karel" else ()
    )

    @lru_cache(maxsize=None)
    def stmts(size: int) -> tuple[Stmt, ...]:
        """All single statements of exactly ``size`` blocks (no RepeatUntil)."""
        out: list[Stmt] = []
        if size == 1:
            out.extend(Action(a) for a in actions)
        if size >= 2:
            for body in bodies(size - 1):
                if "Repeat" in store:
                    out.extend(Repeat(k, body) for k in range(REPEAT_MIN, REPEAT_MAX + 1))
                if "While" in store:
                    out.extend(While(c, body) for c in conditions)
                if "If" in store:
                    out.extend(If(c, body) for c in conditions)
        if size >= 3 and "IfElse" in store:
            for then_size in range(1, size - 1):
                for then_body in bodies(then_size):
                    for else_body in bodies(size - 1 - then_size):
                        out.extend(
                            IfElse(c, then_body, else_body) for c in conditions
                        )
        return tuple(out)

    @lru_cache(maxsize=None)
    def bodies(size: int) -> tuple[tuple[Stmt, ...], ...]:
        """All non-empty statement sequences of total ``size`` blocks."""
        out: list[tuple[Stmt, ...]] = []
        for head_size in range(1, size + 1):
            for head in stmts(head_size):
                if head_size == size:
                    out.append((head,))
                else:
                    out.extend((head,) + tail for tail in bodies(size - head_size))
        return tuple(out)

    for size in range(1, max_size + 1):
        for body in bodies(size):
            yield Program(body)
        if kind == "hoc" and "RepeatUntil" in store and size >= 2:
            # RepeatUntil is only legal as the final top-level statement
            for until_size in range(2, size + 1):
                for until_body in bodies(until_size - 1):
                    tail = RepeatUntil(until_body)
                    if until_size == size:
                        yield Program((tail,))
                    else:
                        for prefix in bodies(size - until_size):
                            yield Program(prefix + (tail,))
