"""Puzzle synthesis: build tasks that a given code solves.

The code is executed symbolically over a grid of unknown cells. Every
unforced condition branches the search, pinning the observed cell; every
loop commits to a bounded trip count. Complete symbolic runs are
materialized into concrete tasks (leftover unknown cells become walls
with a configurable probability), validated against the real emulator,
scored and thinned to a diverse subset.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, replace
from typing import Optional

from .code_dsl import (
    Action,
    HOC_ACTIONS,
    If,
    IfElse,
    KAREL_ACTIONS,
    MARKER_CONDITIONS,
    Program,
    Repeat,
    RepeatUntil,
    Stmt,
    While,
    iter_nodes,
    metrics,
)
from .emulator import (
    DIRECTIONS,
    ExecutionResult,
    MAX_MARKERS,
    Pose,
    SUCCESS,
    TaskSpec,
    check_solves,
    run,
    serialize_task,
)

_DELTA = {"N": (-1, 0), "E": (0, 1), "S": (1, 0), "W": (0, -1)}
_LEFT = {"N": "W", "W": "S", "S": "E", "E": "N"}
_RIGHT = {v: k for k, v in _LEFT.items()}


class SynthesisFailure(Exception):
    """Best-first search found no valid complete task for the code."""


@dataclass(frozen=True)
class SynthParams:
    grid_size: Optional[int] = None  # None: 8 for hoc, 10 for karel
    max_trips: int = 8
    wall_fill_probability: float = 0.3
    beam_width: int = 200
    tasks_per_code: int = 10
    min_diversity: float = 0.2
    rng_seed: int = 0
    kind: Optional[str] = None  # None: inferred from the code's blocks
    check_minimality: bool = False
    max_start_attempts: int = 12
    step_cap: int = 600


def infer_kind(code: Program) -> str:
    blocks = metrics(code).blocks
    conds = {
        node.cond for _, node in iter_nodes(code) if isinstance(node, (While, If, IfElse))
    }
    if blocks & {"pickMarker", "putMarker", "While"} or conds & set(MARKER_CONDITIONS):
        return "karel"
    return "hoc"


class _State:
    """One node of the symbolic search tree."""

    __slots__ = (
        "walls",
        "init_markers",
        "cur_markers",
        "pose",
        "frames",
        "steps",
        "moves",
        "turns",
        "segments",
        "last_action",
        "departed",
        "guard_cells",
        "decisions",
        "jitter",
    )

    def __init__(self, pose: Pose):
        self.walls: dict[tuple[int, int], bool] = {(pose.row, pose.col): False}
        self.init_markers: dict[tuple[int, int], int] = {}
        self.cur_markers: dict[tuple[int, int], int] = {}
        self.pose = pose
        self.frames: tuple = ()
        self.steps = 0
        self.moves = 0
        self.turns = 0
        self.segments = 0
        self.last_action = ""
        self.departed: set[tuple[int, int]] = set()
        self.guard_cells: set[tuple[int, int]] = set()
        self.decisions: tuple = ()
        self.jitter = 0.0

    def clone(self) -> "_State":
        other = _State.__new__(_State)
        other.walls = dict(self.walls)
        other.init_markers = dict(self.init_markers)
        other.cur_markers = dict(self.cur_markers)
        other.pose = self.pose
        other.frames = self.frames
        other.steps = self.steps
        other.moves = self.moves
        other.turns = self.turns
        other.segments = self.segments
        other.last_action = self.last_action
        other.departed = set(self.departed)
        other.guard_cells = set(self.guard_cells)
        other.decisions = self.decisions
        other.jitter = self.jitter
        return other


class _Search:
    def __init__(self, code: Program, kind: str, n: int, params: SynthParams, rng: random.Random):
        self.code = code
        self.kind = kind
        self.n = n
        self.params = params
        self.rng = rng
        self.counter = itertools.count()

    # -- cell helpers ------------------------------------------------

    def _target(self, state: _State, turn: str | None) -> tuple[int, int] | None:
        direction = state.pose.direction
        if turn == "left":
            direction = _LEFT[direction]
        elif turn == "right":
            direction = _RIGHT[direction]
        dr, dc = _DELTA[direction]
        r, c = state.pose.row + dr, state.pose.col + dc
        if not (0 <= r < self.n and 0 <= c < self.n):
            return None
        return (r, c)

    def _observe_path(self, state: _State, turn: str | None, want: bool, path) -> list[tuple[_State, bool]]:
        cell = self._target(state, turn)
        if cell is None:
            out = [(state, False)]
        else:
            known = state.walls.get(cell)
            if known is True:
                out = [(state, False)]
            elif known is False:
                out = [(state, True)]
            else:
                yes = state.clone()
                yes.walls[cell] = False
                no = state.clone()
                no.walls[cell] = True
                out = [(yes, True), (no, False)]
        result = []
        for st, value in out:
            outcome = value if want else not value
            st.decisions = st.decisions + ((path, outcome),)
            result.append((st, outcome))
        return result

    def _observe_markers(self, state: _State, want_present: bool, path) -> list[tuple[_State, bool]]:
        cell = (state.pose.row, state.pose.col)
        if cell in state.cur_markers:
            present = state.cur_markers[cell] > 0
            state.decisions = state.decisions + ((path, present if want_present else not present),)
            return [(state, present if want_present else not present)]
        yes = state.clone()
        count = self.rng.choice((1, 2))
        yes.init_markers[cell] = count
        yes.cur_markers[cell] = count
        no = state.clone()
        no.init_markers[cell] = 0
        no.cur_markers[cell] = 0
        out = [(yes, True), (no, False)]
        result = []
        for st, present in out:
            outcome = present if want_present else not present
            st.decisions = st.decisions + ((path, outcome),)
            result.append((st, outcome))
        return result

    def _eval_cond(self, state: _State, cond: str, path) -> list[tuple[_State, bool]]:
        if cond == "pathAhead":
            return self._observe_path(state, None, True, path)
        if cond == "noPathAhead":
            return self._observe_path(state, None, False, path)
        if cond == "pathLeft":
            return self._observe_path(state, "left", True, path)
        if cond == "pathRight":
            return self._observe_path(state, "right", True, path)
        if cond == "markersPresent":
            return self._observe_markers(state, True, path)
        if cond == "noMarkersPresent":
            return self._observe_markers(state, False, path)
        raise ValueError(f"unknown condition {cond!r}")

    def _apply_action(self, state: _State, kind: str) -> bool:
        """Mutate the state; False when the action would crash."""
        if state.steps >= self.params.step_cap:
            return False
        state.steps += 1
        if kind == "move":
            cell = self._target(state, None)
            if cell is None or state.walls.get(cell) is True:
                return False
            state.walls[cell] = False
            state.departed.add((state.pose.row, state.pose.col))
            state.pose = Pose(cell[0], cell[1], state.pose.direction)
            state.moves += 1
            if state.last_action != "move":
                state.segments += 1
        elif kind == "turnLeft":
            state.pose = replace(state.pose, direction=_LEFT[state.pose.direction])
            state.turns += 1
        elif kind == "turnRight":
            state.pose = replace(state.pose, direction=_RIGHT[state.pose.direction])
            state.turns += 1
        elif kind == "pickMarker":
            cell = (state.pose.row, state.pose.col)
            if cell not in state.cur_markers:
                count = self.rng.choice((1, 2))
                state.init_markers[cell] = count
                state.cur_markers[cell] = count
            if state.cur_markers[cell] <= 0:
                return False
            state.cur_markers[cell] -= 1
        elif kind == "putMarker":
            cell = (state.pose.row, state.pose.col)
            if cell not in state.cur_markers:
                state.init_markers[cell] = 0
                state.cur_markers[cell] = 0
            if state.cur_markers[cell] >= MAX_MARKERS:
                return False
            state.cur_markers[cell] += 1
        state.last_action = kind
        return True

    # -- machine -----------------------------------------------------

    def step(self, state: _State) -> list[_State]:
        frame = state.frames[-1]
        tag = frame[0]
        if tag == "seq":
            _, stmts, idx, prefix = frame
            if idx == len(stmts):
                state.frames = state.frames[:-1]
                return [state]
            stmt: Stmt = stmts[idx]
            path = prefix + (idx,)
            state.frames = state.frames[:-1] + (("seq", stmts, idx + 1, prefix),)
            return self._dispatch(state, stmt, path)
        if tag == "repeat":
            _, node, remaining, path = frame
            if remaining == 0:
                state.frames = state.frames[:-1]
                return [state]
            state.frames = state.frames[:-1] + (
                ("repeat", node, remaining - 1, path),
                ("seq", node.body, 0, path),
            )
            return [state]
        if tag == "runtil":
            _, node, remaining, path = frame
            if remaining == 0:
                state.frames = state.frames[:-1]
                return [state]
            state.guard_cells.add((state.pose.row, state.pose.col))
            state.frames = state.frames[:-1] + (
                ("runtil", node, remaining - 1, path),
                ("seq", node.body, 0, path),
            )
            return [state]
        if tag == "while":
            _, node, trips, path = frame
            outcomes = self._eval_cond(state, node.cond, path)
            children = []
            for st, value in outcomes:
                if value:
                    if trips + 1 > self.params.max_trips:
                        continue
                    st.frames = st.frames[:-1] + (
                        ("while", node, trips + 1, path),
                        ("seq", node.body, 0, path),
                    )
                else:
                    st.frames = st.frames[:-1]
                children.append(st)
            return children
        raise AssertionError(f"unknown frame {tag!r}")

    def _dispatch(self, state: _State, stmt: Stmt, path) -> list[_State]:
        if isinstance(stmt, Action):
            return [state] if self._apply_action(state, stmt.kind) else []
        if isinstance(stmt, Repeat):
            state.frames = state.frames + (("repeat", stmt, stmt.count, path),)
            return [state]
        if isinstance(stmt, RepeatUntil):
            children = []
            for trips in range(1, self.params.max_trips + 1):
                child = state.clone()
                child.frames = child.frames + (("runtil", stmt, trips, path),)
                child.jitter = self.rng.uniform(0.0, 0.2)
                children.append(child)
            return children
        if isinstance(stmt, While):
            state.frames = state.frames + (("while", stmt, 0, path),)
            return [state]
        if isinstance(stmt, If):
            children = []
            for st, value in self._eval_cond(state, stmt.cond, path):
                if value:
                    st.frames = st.frames + (("seq", stmt.body, 0, path),)
                children.append(st)
            return children
        if isinstance(stmt, IfElse):
            children = []
            for st, value in self._eval_cond(state, stmt.cond, path):
                if value:
                    st.frames = st.frames + (("seq", stmt.then_body, 0, path + (0,)),)
                else:
                    st.frames = st.frames + (("seq", stmt.else_body, 0, path + (1,)),)
                children.append(st)
            return children
        raise ValueError(f"cannot synthesize over {stmt!r}")

    def _priority(self, state: _State) -> float:
        n = self.n
        q = (
            min(state.moves, 2 * n) / (2 * n)
            + min(state.turns, n) / n
            + min(state.segments, n / 2) / (n / 2)
        ) / 4.0
        return q + state.jitter

    def complete_states(self, start: Pose, want: int) -> list[_State]:
        init = _State(start)
        init.frames = (("seq", self.code.body, 0, ()),)
        heap: list[tuple[float, int, _State]] = [(0.0, next(self.counter), init)]
        done: list[_State] = []
        pops = 0
        budget = self.params.beam_width * 50
        while heap and pops < budget and len(done) < want:
            pops += 1
            _, _, state = heapq.heappop(heap)
            while True:
                if not state.frames:
                    done.append(state)
                    break
                children = self.step(state)
                if not children:
                    break
                if len(children) == 1:
                    state = children[0]
                    continue
                for child in children:
                    child.jitter = self.rng.uniform(0.0, 0.2)
                    heapq.heappush(heap, (-self._priority(child), next(self.counter), child))
                break
            if len(heap) > 4 * self.params.beam_width:
                heap = heapq.nsmallest(self.params.beam_width, heap)
                heapq.heapify(heap)
        return done


def _final_goal_ok(state: _State) -> bool:
    final = (state.pose.row, state.pose.col)
    if final in state.departed or final in state.guard_cells:
        return False
    return True


def _materialize(
    state: _State,
    code: Program,
    kind: str,
    n: int,
    params: SynthParams,
    rng: random.Random,
    start: Pose,
) -> TaskSpec | None:
    if kind == "hoc" and not _final_goal_ok(state):
        return None
    walls = []
    pre = []
    for r in range(n):
        wall_row = []
        pre_row = []
        for c in range(n):
            known = state.walls.get((r, c))
            if known is None:
                wall_row.append(rng.random() < params.wall_fill_probability)
            else:
                wall_row.append(known)
            pre_row.append(state.init_markers.get((r, c), 0))
        walls.append(tuple(wall_row))
        pre.append(tuple(pre_row))

    used = metrics(code).blocks
    if kind == "hoc":
        store = frozenset(used) | frozenset(HOC_ACTIONS)
        goal = (state.pose.row, state.pose.col)
        if goal == (start.row, start.col):
            return None
        return TaskSpec(
            kind="hoc",
            size=n,
            walls=tuple(walls),
            start=start,
            store=store,
            max_blocks=metrics(code).size,
            goal=goal,
        )
    store = frozenset(used) | frozenset(KAREL_ACTIONS)
    post = []
    for r in range(n):
        post_row = []
        for c in range(n):
            post_row.append(state.cur_markers.get((r, c), state.init_markers.get((r, c), 0)))
        post.append(tuple(post_row))
    return TaskSpec(
        kind="karel",
        size=n,
        walls=tuple(walls),
        start=start,
        store=store,
        max_blocks=metrics(code).size,
        pre_markers=tuple(pre),
        post_markers=tuple(post),
        agent_post=state.pose,
    )


def _quality_from_result(result: ExecutionResult, n: int) -> float:
    actions = [a for _, a in result.trace]
    moves = sum(1 for a in actions if a == "move")
    turns = sum(1 for a in actions if a in ("turnLeft", "turnRight"))
    segments = 0
    prev = ""
    for a in actions:
        if a == "move" and prev != "move":
            segments += 1
        prev = a
    half = n / 2
    return (
        min(moves, 2 * n) / (2 * n)
        + min(turns, n) / n
        + min(segments, half) / half
        + result.block_coverage
    ) / 4.0


def quality_score(task: TaskSpec, code: Program) -> float:
    """Trace-derived quality in [0,1]; requires that the code solves the task."""
    result = run(code, task)
    if result.status != SUCCESS:
        raise ValueError("quality is only defined for a solving code")
    return _quality_from_result(result, task.size)


def grid_dissimilarity(t1: TaskSpec, t2: TaskSpec) -> float:
    """Fraction of cells that differ between two tasks (1.0 across sizes)."""
    if t1.size != t2.size:
        return 1.0
    n = t1.size
    diff = 0
    for r in range(n):
        for c in range(n):
            a = (
                t1.walls[r][c],
                t1.goal == (r, c),
                t1.pre_markers[r][c] if t1.pre_markers else 0,
                (t1.start.row, t1.start.col) == (r, c),
            )
            b = (
                t2.walls[r][c],
                t2.goal == (r, c),
                t2.pre_markers[r][c] if t2.pre_markers else 0,
                (t2.start.row, t2.start.col) == (r, c),
            )
            if a != b:
                diff += 1
    return diff / (n * n)


def select_diverse(
    candidates: list[tuple[TaskSpec, float]], m: int, d_min: float
) -> list[tuple[TaskSpec, float]]:
    """Greedy max-quality subset with pairwise dissimilarity >= d_min."""
    ranked = sorted(candidates, key=lambda tq: (-tq[1], serialize_task(tq[0])))
    chosen: list[tuple[TaskSpec, float]] = []
    for task, quality in ranked:
        if len(chosen) >= m:
            break
        if all(grid_dissimilarity(task, t) >= d_min for t, _ in chosen):
            chosen.append((task, quality))
    return chosen


def _both_outcomes_exercised(code: Program, result: ExecutionResult) -> bool:
    branch_paths = [
        path for path, node in iter_nodes(code) if isinstance(node, (If, IfElse))
    ]
    if not branch_paths:
        return True
    return any(
        result.condition_outcomes.get(path) == frozenset((True, False))
        for path in branch_paths
    )


def _solvable_by_smaller(task: TaskSpec, limit: int) -> bool:
    from .enumeration import enumerate_codes  # local import to avoid a cycle

    for code in enumerate_codes(task.store, limit, task.kind):
        try:
            if check_solves(code, task):
                return True
        except Exception:
            continue
    return False


def synthesize_tasks(code: Program, params: SynthParams | None = None) -> list[tuple[TaskSpec, float]]:
    """Tasks solved by ``code``, scored and diversity-thinned.

    Returns at most ``params.tasks_per_code`` (task, quality) pairs in
    descending quality order. Raises SynthesisFailure when the search
    finds no valid task.
    """
    params = params or SynthParams()
    kind = params.kind or infer_kind(code)
    n = params.grid_size or (8 if kind == "hoc" else 10)
    rng = random.Random(params.rng_seed)

    candidates: list[tuple[TaskSpec, float]] = []
    seen: set[str] = set()
    want = params.tasks_per_code
    for _ in range(params.max_start_attempts):
        row = rng.randrange(n)
        col = rng.randrange(n)
        direction = rng.choice(DIRECTIONS)
        start = Pose(row, col, direction)
        search = _Search(code, kind, n, params, rng)
        for state in search.complete_states(start, want * 2):
            task = _materialize(state, code, kind, n, params, rng, start)
            if task is None:
                continue
            key = serialize_task(task)
            if key in seen:
                continue
            seen.add(key)
            result = run(code, task, params.step_cap)
            if result.status != SUCCESS:
                continue
            if not _both_outcomes_exercised(code, result):
                continue
            if params.check_minimality and metrics(code).size >= 3:
                if _solvable_by_smaller(task, metrics(code).size - 2):
                    continue
            candidates.append((task, _quality_from_result(result, n)))
        if len(candidates) >= want * 3:
            break
    if not candidates:
        raise SynthesisFailure(
            f"no valid task found for code of size {metrics(code).size} ({kind}, n={n})"
        )
    return select_diverse(candidates, want, params.min_diversity)
