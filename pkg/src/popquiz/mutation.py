"""Candidate quiz codes from a seed: sketch-preserving mutation.

Mutation never adds or removes a programming construct, so every
candidate shares the seed's sketch. Within that skeleton it resamples
action leaves from the task store, grows or shrinks the action count
inside a size band, swaps conditions within their compatibility class
and retunes repeat counts. Candidates that are trivially redundant
(adjacent inverse actions, identical branches, a condition re-tested as
the first statement of its own scope) or that sit too close to the
reference solution are discarded.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .code_dsl import (
    Action,
    GrammarError,
    HOC_ACTIONS,
    KAREL_ACTIONS,
    MARKER_CONDITIONS,
    PATH_CONDITIONS,
    Program,
    REPEAT_MAX,
    REPEAT_MIN,
    Repeat,
    RepeatUntil,
    If,
    IfElse,
    Stmt,
    While,
    code_distance,
    iter_nodes,
    metrics,
    serialize,
    validate,
)
from .sketch import Sketch, abstract

_INVERSE_PAIRS = {
    ("turnLeft", "turnRight"),
    ("turnRight", "turnLeft"),
    ("pickMarker", "putMarker"),
    ("putMarker", "pickMarker"),
}

# internal bound on raw enumeration, not on the returned list
_ENUM_CAP = 20000


class NoCandidates(Exception):
    """The constraint set admits no mutation within the search budget."""


@dataclass(frozen=True)
class MutationParams:
    delta_size: int = 2
    theta_conceal: int = 2
    max_candidates: int = 64
    rng_seed: int = 0


def condition_class(cond: str) -> tuple[str, ...]:
    """Conditions a given condition may be swapped with (its class)."""
    if cond in MARKER_CONDITIONS:
        return MARKER_CONDITIONS
    return PATH_CONDITIONS


def infer_store(*codes: Program) -> frozenset[str]:
    """Action store implied by the blocks and conditions a code group uses."""
    karel = any(
        b in ("pickMarker", "putMarker", "While") for code in codes for b in metrics(code).blocks
    ) or any(
        node.cond in MARKER_CONDITIONS
        for code in codes
        for _, node in iter_nodes(code)
        if isinstance(node, (While, If, IfElse))
    )
    return frozenset(KAREL_ACTIONS if karel else HOC_ACTIONS)


def _gap_fills(actions: tuple[str, ...], total: int, bounds: list[tuple[int, int | None]]):
    """Distribute ``total`` actions over bounded slots, all orderings."""
    for counts in _bounded_compositions(total, bounds):
        pools = [itertools.product(actions, repeat=k) for k in counts]
        for combo in itertools.product(*pools):
            yield combo


def _bounded_compositions(total: int, bounds: list[tuple[int, int | None]]):
    if not bounds:
        if total == 0:
            yield ()
        return
    lo, hi = bounds[0]
    hi = total if hi is None else min(hi, total)
    for head in range(lo, hi + 1):
        for tail in _bounded_compositions(total - head, bounds[1:]):
            yield (head,) + tail


class _Skeleton:
    """The seed code with its action leaves stripped out.

    Construct sites keep their position; enumeration re-fills the action
    gaps around them and re-parameterizes counts and conditions.
    """

    def __init__(self, seed: Program):
        self.sites: list[Stmt] = list(_walk_constructs(seed.body))

    def count_options(self) -> list[tuple[int, ...]]:
        opts = []
        for node in self.sites:
            if isinstance(node, Repeat):
                opts.append(tuple(range(REPEAT_MIN, REPEAT_MAX + 1)))
        return opts

    def cond_options(self, kind_conditions: tuple[str, ...]) -> list[tuple[str, ...]]:
        opts = []
        for node in self.sites:
            if isinstance(node, (While, If, IfElse)):
                cls = tuple(c for c in condition_class(node.cond) if c in kind_conditions)
                opts.append(cls or (node.cond,))
        return opts


def _walk_constructs(body: tuple[Stmt, ...]):
    for stmt in body:
        if isinstance(stmt, (Repeat, RepeatUntil, While, If)):
            yield stmt
            yield from _walk_constructs(stmt.body)
        elif isinstance(stmt, IfElse):
            yield stmt
            yield from _walk_constructs(stmt.then_body)
            yield from _walk_constructs(stmt.else_body)


def _rebuild(body: tuple[Stmt, ...], counts: list[int], conds: list[str], fills) -> tuple[Stmt, ...]:
    """Reassemble a body, pulling one action-gap fill per construct gap.

    ``fills`` is an iterator of action tuples, consumed in the same order
    ``_gap_structure`` reports gaps.
    """
    construct_children = [s for s in body if not isinstance(s, Action)]
    out: list[Stmt] = []
    out.extend(Action(a) for a in next(fills))
    for child in construct_children:
        if isinstance(child, Repeat):
            out.append(Repeat(counts.pop(0), _rebuild(child.body, counts, conds, fills)))
        elif isinstance(child, RepeatUntil):
            out.append(RepeatUntil(_rebuild(child.body, counts, conds, fills)))
        elif isinstance(child, While):
            out.append(While(conds.pop(0), _rebuild(child.body, counts, conds, fills)))
        elif isinstance(child, If):
            out.append(If(conds.pop(0), _rebuild(child.body, counts, conds, fills)))
        elif isinstance(child, IfElse):
            cond = conds.pop(0)
            then_body = _rebuild(child.then_body, counts, conds, fills)
            else_body = _rebuild(child.else_body, counts, conds, fills)
            out.append(IfElse(cond, then_body, else_body))
        out.extend(Action(a) for a in next(fills))
    return tuple(out)


def _gap_bounds(body: tuple[Stmt, ...], top_level: bool) -> list[tuple[int, int | None]]:
    """Per-gap (min, max) action counts in ``_rebuild`` consumption order.

    A construct-free body is a single gap that must hold at least one
    action; the slot after a trailing top-level RepeatUntil must stay
    empty. Bodies holding constructs are non-empty by construction.
    """
    constructs = [s for s in body if not isinstance(s, Action)]
    if not constructs:
        return [(1, None)]
    bounds: list[tuple[int, int | None]] = [(0, None)]
    for i, child in enumerate(constructs):
        if isinstance(child, IfElse):
            bounds += _gap_bounds(child.then_body, False)
            bounds += _gap_bounds(child.else_body, False)
        elif isinstance(child, (Repeat, RepeatUntil, While, If)):
            bounds += _gap_bounds(child.body, False)
        after_until = top_level and i == len(constructs) - 1 and isinstance(child, RepeatUntil)
        bounds.append((0, 0) if after_until else (0, None))
    return bounds


def has_redundancy(code: Program) -> bool:
    """Adjacent inverse actions, mirror branches or a re-tested condition."""

    def body_redundant(body: tuple[Stmt, ...], known_cond: str | None) -> bool:
        for prev, nxt in zip(body, body[1:]):
            if isinstance(prev, Action) and isinstance(nxt, Action):
                if (prev.kind, nxt.kind) in _INVERSE_PAIRS:
                    return True
        if body and known_cond is not None:
            first = body[0]
            if isinstance(first, (While, If, IfElse)) and first.cond == known_cond:
                return True
        for stmt in body:
            if isinstance(stmt, (Repeat, RepeatUntil)):
                if body_redundant(stmt.body, None):
                    return True
            elif isinstance(stmt, While):
                if body_redundant(stmt.body, stmt.cond):
                    return True
            elif isinstance(stmt, If):
                if body_redundant(stmt.body, stmt.cond):
                    return True
            elif isinstance(stmt, IfElse):
                if stmt.then_body == stmt.else_body:
                    return True
                if body_redundant(stmt.then_body, stmt.cond):
                    return True
                if body_redundant(stmt.else_body, stmt.cond):
                    return True
        return False

    return body_redundant(code.body, None)


def mutate(
    seed: Program,
    target_sketch: Sketch,
    solution: Program,
    params: MutationParams | None = None,
    store: frozenset[str] | None = None,
) -> list[Program]:
    """Enumerate mutation candidates of ``seed`` preserving its sketch.

    Candidates are returned in descending distance from ``solution``
    (ties shuffled deterministically by the params seed) and truncated to
    ``max_candidates``.
    """
    params = params or MutationParams()
    if abstract(seed) != target_sketch:
        raise ValueError("seed does not instantiate the target sketch")
    if store is None:
        store = infer_store(seed, solution)
    actions = tuple(a for a in KAREL_ACTIONS if a in store)
    if not actions:
        raise ValueError("store contains no actions")
    kind_conditions = (
        tuple(PATH_CONDITIONS) + tuple(MARKER_CONDITIONS)
        if ("pickMarker" in store or "putMarker" in store)
        else tuple(PATH_CONDITIONS)
    )

    skeleton = _Skeleton(seed)
    seed_size = metrics(seed).size
    n_constructs = len(skeleton.sites)
    bounds = _gap_bounds(seed.body, True)
    min_actions = sum(lo for lo, _ in bounds)
    lo = max(min_actions, seed_size - params.delta_size - n_constructs)
    hi = seed_size + params.delta_size - n_constructs

    count_opts = skeleton.count_options()
    cond_opts = skeleton.cond_options(kind_conditions)

    out: set[Program] = set()
    budget = _ENUM_CAP
    for n_actions in range(lo, hi + 1):
        if budget <= 0:
            break
        for fill in _gap_fills(actions, n_actions, bounds):
            if budget <= 0:
                break
            for counts in itertools.product(*count_opts) if count_opts else ((),):
                if budget <= 0:
                    break
                for conds in itertools.product(*cond_opts) if cond_opts else ((),):
                    budget -= 1
                    if budget <= 0:
                        break
                    body = _rebuild(seed.body, list(counts), list(conds), iter(fill))
                    candidate = Program(body)
                    try:
                        validate(candidate)
                    except GrammarError:
                        continue
                    if abstract(candidate) != target_sketch:
                        continue
                    if has_redundancy(candidate):
                        continue
                    out.add(candidate)

    rng = random.Random(params.rng_seed)
    ordered = sorted(out, key=serialize)
    rng.shuffle(ordered)
    survivors = [
        (code_distance(c, solution), c) for c in ordered
    ]
    survivors = [(d, c) for d, c in survivors if d >= params.theta_conceal]
    survivors.sort(key=lambda item: -item[0])
    result = [c for _, c in survivors[: params.max_candidates]]
    if not result:
        raise NoCandidates(
            f"no sketch-preserving candidate within the size band clears "
            f"theta={params.theta_conceal}"
        )
    return result
