"""Deterministic grid-world execution of codes on maze and marker tasks.

Maze ("hoc") runs succeed the moment the agent occupies the goal cell.
Marker ("karel") runs succeed when the program ends without crashing, the
marker grid matches the target grid and, if the task requires it, the
agent ends in the required pose.

Task text format (UTF-8, rows top to bottom, 0-indexed from top-left)::

    kind:hoc|karel
    size:n
    <n grid rows: '#' wall, '.' free, '+' goal (hoc), '1'-'9' markers (karel)>
    agent:row,col,dir
    <karel only: n rows with the target marker grid>
    [karel only, optional] agentpost:row,col,dir
    store:<comma-separated block names>
    maxblocks:<int>
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .code_dsl import (
    Action,
    Blank,
    GrammarError,
    HOC_STORE,
    If,
    IfElse,
    KAREL_STORE,
    MARKER_CONDITIONS,
    Program,
    Repeat,
    RepeatUntil,
    Stmt,
    While,
    iter_nodes,
    metrics,
)

DIRECTIONS = ("N", "E", "S", "W")
_DELTA = {"N": (-1, 0), "E": (0, 1), "S": (1, 0), "W": (0, -1)}
_LEFT = {"N": "W", "W": "S", "S": "E", "E": "N"}
_RIGHT = {v: k for k, v in _LEFT.items()}

DEFAULT_STEP_CAP = 1000
MAX_MARKERS = 9

SUCCESS = "success"
CRASH = "crash"
TIMEOUT = "timeout"
INCOMPLETE = "incomplete"


class TaskError(Exception):
    """Malformed task text; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class StoreViolation(Exception):
    """Code uses blocks or conditions outside the task's store."""


class SizeViolation(Exception):
    """Code exceeds the task's block threshold."""


@dataclass(frozen=True)
class Pose:
    row: int
    col: int
    direction: str


Grid = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class TaskSpec:
    kind: str  # "hoc" | "karel"
    size: int
    walls: tuple[tuple[bool, ...], ...]
    start: Pose
    store: frozenset[str]
    max_blocks: int
    goal: Optional[tuple[int, int]] = None
    pre_markers: Optional[Grid] = None
    post_markers: Optional[Grid] = None
    agent_post: Optional[Pose] = None


@dataclass(frozen=True)
class ExecutionResult:
    status: str
    steps_used: int
    trace: tuple[tuple[Pose, str], ...]
    block_coverage: float
    visited_cells: frozenset[tuple[int, int]]
    final_pose: Pose
    final_markers: Optional[Grid] = None
    condition_outcomes: dict = field(default_factory=dict, compare=False)


def _parse_pose(value: str, n: int, line_no: int) -> Pose:
    parts = value.split(",")
    if len(parts) != 3:
        raise TaskError("agent line must be row,col,dir", line_no)
    try:
        row, col = int(parts[0]), int(parts[1])
    except ValueError:
        raise TaskError("agent coordinates must be integers", line_no)
    direction = parts[2].strip()
    if direction not in DIRECTIONS:
        raise TaskError(f"direction must be one of {'/'.join(DIRECTIONS)}", line_no)
    if not (0 <= row < n and 0 <= col < n):
        raise TaskError("agent outside the grid", line_no)
    return Pose(row, col, direction)


def _parse_grid_rows(lines: list[str], start: int, n: int, kind: str, allow_goal: bool):
    walls = []
    markers = []
    goal = None
    for r in range(n):
        line_no = start + r + 1
        if start + r >= len(lines):
            raise TaskError("missing grid row", line_no)
        row = lines[start + r]
        if len(row) != n:
            raise TaskError(f"grid row must have exactly {n} characters", line_no)
        wall_row = []
        marker_row = []
        for c, ch in enumerate(row):
            if ch == "#":
                wall_row.append(True)
                marker_row.append(0)
            elif ch == ".":
                wall_row.append(False)
                marker_row.append(0)
            elif ch == "+":
                if kind != "hoc" or not allow_goal:
                    raise TaskError("goal marker '+' only allowed in a hoc grid", line_no)
                if goal is not None:
                    raise TaskError("more than one goal cell", line_no)
                wall_row.append(False)
                marker_row.append(0)
                goal = (r, c)
            elif ch.isdigit() and ch != "0":
                if kind != "karel":
                    raise TaskError("marker digits only allowed in karel grids", line_no)
                wall_row.append(False)
                marker_row.append(int(ch))
            else:
                raise TaskError(f"bad grid character {ch!r}", line_no)
        walls.append(tuple(wall_row))
        markers.append(tuple(marker_row))
    return tuple(walls), tuple(markers), goal


def parse_task(text: str) -> TaskSpec:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) < 2:
        raise TaskError("task file too short", 1)

    def keyed(idx: int, key: str) -> str:
        if idx >= len(lines) or not lines[idx].startswith(key + ":"):
            raise TaskError(f"expected '{key}:' line", idx + 1)
        return lines[idx][len(key) + 1:].strip()

    kind = keyed(0, "kind")
    if kind not in ("hoc", "karel"):
        raise TaskError("kind must be hoc or karel", 1)
    try:
        n = int(keyed(1, "size"))
    except ValueError:
        raise TaskError("size must be an integer", 2)
    if not (2 <= n <= 16):
        raise TaskError("size must lie in [2,16]", 2)

    walls, markers, goal = _parse_grid_rows(lines, 2, n, kind, allow_goal=True)
    idx = 2 + n
    start = _parse_pose(keyed(idx, "agent"), n, idx + 1)
    idx += 1

    post_markers = None
    agent_post = None
    if kind == "karel":
        post_walls, post_markers, _ = _parse_grid_rows(lines, idx, n, kind, allow_goal=False)
        if post_walls != walls:
            raise TaskError("target grid walls must match the start grid", idx + 1)
        idx += n
        if idx < len(lines) and lines[idx].startswith("agentpost:"):
            agent_post = _parse_pose(keyed(idx, "agentpost"), n, idx + 1)
            idx += 1

    store_names = [s.strip() for s in keyed(idx, "store").split(",") if s.strip()]
    legal = HOC_STORE if kind == "hoc" else KAREL_STORE
    for name in store_names:
        if name not in legal:
            raise TaskError(f"block {name!r} not available for {kind} tasks", idx + 1)
    idx += 1
    try:
        max_blocks = int(keyed(idx, "maxblocks"))
    except ValueError:
        raise TaskError("maxblocks must be an integer", idx + 1)
    if max_blocks < 1:
        raise TaskError("maxblocks must be at least 1", idx + 1)
    idx += 1
    if idx != len(lines):
        raise TaskError("trailing content after maxblocks", idx + 1)

    if kind == "hoc" and goal is None:
        raise TaskError("hoc task needs exactly one goal cell", 3)

    task = TaskSpec(
        kind=kind,
        size=n,
        walls=walls,
        start=start,
        store=frozenset(store_names),
        max_blocks=max_blocks,
        goal=goal,
        pre_markers=markers if kind == "karel" else None,
        post_markers=post_markers,
        agent_post=agent_post,
    )
    _validate_task(task)
    return task


def _validate_task(task: TaskSpec) -> None:
    if task.walls[task.start.row][task.start.col]:
        raise TaskError("agent starts on a wall")
    if task.kind == "hoc":
        gr, gc = task.goal
        if task.walls[gr][gc]:
            raise TaskError("goal sits on a wall")
    else:
        for grid in (task.pre_markers, task.post_markers):
            for r in range(task.size):
                for c in range(task.size):
                    if grid[r][c] and task.walls[r][c]:
                        raise TaskError("markers on a wall cell")
        if task.agent_post and task.walls[task.agent_post.row][task.agent_post.col]:
            raise TaskError("agentpost on a wall cell")


def serialize_task(task: TaskSpec) -> str:
    lines = [f"kind:{task.kind}", f"size:{task.size}"]

    def grid_rows(markers: Optional[Grid], goal: Optional[tuple[int, int]]) -> list[str]:
        rows = []
        for r in range(task.size):
            chars = []
            for c in range(task.size):
                if task.walls[r][c]:
                    chars.append("#")
                elif goal is not None and (r, c) == goal:
                    chars.append("+")
                elif markers is not None and markers[r][c]:
                    chars.append(str(markers[r][c]))
                else:
                    chars.append(".")
            rows.append("".join(chars))
        return rows

    lines.extend(grid_rows(task.pre_markers, task.goal))
    lines.append(f"agent:{task.start.row},{task.start.col},{task.start.direction}")
    if task.kind == "karel":
        lines.extend(grid_rows(task.post_markers, None))
        if task.agent_post:
            p = task.agent_post
            lines.append(f"agentpost:{p.row},{p.col},{p.direction}")
    lines.append("store:" + ",".join(sorted(task.store)))
    lines.append(f"maxblocks:{task.max_blocks}")
    return "\n".join(lines) + "\n"


class _Halt(Exception):
    def __init__(self, status: str):
        self.status = status


class _Sim:
    """Mutable interpreter state for one run."""

    def __init__(self, code: Program, task: TaskSpec, step_cap: int):
        self.task = task
        self.step_cap = step_cap
        self.tick_cap = max(20 * step_cap, 1000)
        self.pose = task.start
        self.markers = [list(row) for row in (task.pre_markers or ())] or None
        self.steps = 0
        self.ticks = 0
        self.trace: list[tuple[Pose, str]] = []
        self.visited: set[tuple[int, int]] = {(task.start.row, task.start.col)}
        self.executed: set[tuple[int, ...]] = set()
        self.cond_outcomes: dict[tuple[int, ...], set[bool]] = {}

    def free(self, row: int, col: int) -> bool:
        n = self.task.size
        return 0 <= row < n and 0 <= col < n and not self.task.walls[row][col]

    def ahead_cell(self, turn: str | None = None) -> tuple[int, int]:
        direction = self.pose.direction
        if turn == "left":
            direction = _LEFT[direction]
        elif turn == "right":
            direction = _RIGHT[direction]
        dr, dc = _DELTA[direction]
        return self.pose.row + dr, self.pose.col + dc

    def tick(self) -> None:
        self.ticks += 1
        if self.ticks > self.tick_cap:
            raise _Halt(TIMEOUT)

    def do_action(self, node: Action, path: tuple[int, ...]) -> None:
        if self.steps >= self.step_cap:
            raise _Halt(TIMEOUT)
        self.tick()
        self.executed.add(path)
        self.trace.append((self.pose, node.kind))
        self.steps += 1
        kind = node.kind
        if kind == "move":
            r, c = self.ahead_cell()
            if not self.free(r, c):
                raise _Halt(CRASH)
            self.pose = Pose(r, c, self.pose.direction)
            self.visited.add((r, c))
            self.check_goal()
        elif kind == "turnLeft":
            self.pose = Pose(self.pose.row, self.pose.col, _LEFT[self.pose.direction])
        elif kind == "turnRight":
            self.pose = Pose(self.pose.row, self.pose.col, _RIGHT[self.pose.direction])
        elif kind == "pickMarker":
            cell = self.markers[self.pose.row][self.pose.col]
            if cell <= 0:
                raise _Halt(CRASH)
            self.markers[self.pose.row][self.pose.col] = cell - 1
        elif kind == "putMarker":
            cell = self.markers[self.pose.row][self.pose.col]
            if cell >= MAX_MARKERS:
                raise _Halt(CRASH)
            self.markers[self.pose.row][self.pose.col] = cell + 1

    def check_goal(self) -> None:
        if self.task.kind == "hoc" and (self.pose.row, self.pose.col) == self.task.goal:
            raise _Halt(SUCCESS)

    def eval_cond(self, cond: str, path: tuple[int, ...]) -> bool:
        self.tick()
        self.executed.add(path)
        if cond == "pathAhead":
            value = self.free(*self.ahead_cell())
        elif cond == "noPathAhead":
            value = not self.free(*self.ahead_cell())
        elif cond == "pathLeft":
            value = self.free(*self.ahead_cell("left"))
        elif cond == "pathRight":
            value = self.free(*self.ahead_cell("right"))
        elif cond == "markersPresent":
            value = self.markers[self.pose.row][self.pose.col] > 0
        elif cond == "noMarkersPresent":
            value = self.markers[self.pose.row][self.pose.col] == 0
        else:
            raise GrammarError(f"unknown condition {cond!r}")
        self.cond_outcomes.setdefault(path, set()).add(value)
        return value

    def exec_body(self, body: tuple[Stmt, ...], prefix: tuple[int, ...]) -> None:
        for i, stmt in enumerate(body):
            self.exec_stmt(stmt, prefix + (i,))

    def exec_stmt(self, stmt: Stmt, path: tuple[int, ...]) -> None:
        if isinstance(stmt, Action):
            self.do_action(stmt, path)
        elif isinstance(stmt, Blank):
            raise GrammarError("cannot execute a code with a blank")
        elif isinstance(stmt, Repeat):
            self.executed.add(path)
            for _ in range(stmt.count):
                self.tick()
                self.exec_body(stmt.body, path)
        elif isinstance(stmt, RepeatUntil):
            self.executed.add(path)
            while True:
                self.tick()
                on_goal = (self.pose.row, self.pose.col) == self.task.goal
                self.cond_outcomes.setdefault(path, set()).add(on_goal)
                if on_goal:
                    raise _Halt(SUCCESS)
                self.exec_body(stmt.body, path)
        elif isinstance(stmt, While):
            while self.eval_cond(stmt.cond, path):
                self.exec_body(stmt.body, path)
        elif isinstance(stmt, If):
            if self.eval_cond(stmt.cond, path):
                self.exec_body(stmt.body, path)
        elif isinstance(stmt, IfElse):
            if self.eval_cond(stmt.cond, path):
                self.exec_body(stmt.then_body, path + (0,))
            else:
                self.exec_body(stmt.else_body, path + (1,))


def _check_preconditions(code: Program, task: TaskSpec) -> None:
    m = metrics(code)
    extra = m.blocks - task.store
    if extra:
        raise StoreViolation(f"blocks outside the task store: {', '.join(sorted(extra))}")
    if task.kind == "hoc":
        used_conds = {
            node.cond
            for _, node in iter_nodes(code)
            if isinstance(node, (While, If, IfElse))
        }
        bad = used_conds & set(MARKER_CONDITIONS)
        if bad:
            raise StoreViolation(f"marker conditions in a hoc code: {', '.join(sorted(bad))}")
    if m.size > task.max_blocks:
        raise SizeViolation(f"code has {m.size} blocks, threshold is {task.max_blocks}")


def run(code: Program, task: TaskSpec, step_cap: int = DEFAULT_STEP_CAP) -> ExecutionResult:
    """Execute ``code`` on ``task``; pure up to the returned result."""
    _check_preconditions(code, task)
    sim = _Sim(code, task, step_cap)
    status = INCOMPLETE
    try:
        sim.check_goal()
        sim.exec_body(code.body, ())
    except _Halt as halt:
        status = halt.status
    else:
        if task.kind == "karel":
            markers_ok = tuple(tuple(row) for row in sim.markers) == task.post_markers
            pose_ok = task.agent_post is None or sim.pose == task.agent_post
            status = SUCCESS if markers_ok and pose_ok else INCOMPLETE

    total = metrics(code).size
    coverage = len(sim.executed) / total if total else 0.0
    return ExecutionResult(
        status=status,
        steps_used=sim.steps,
        trace=tuple(sim.trace),
        block_coverage=coverage,
        visited_cells=frozenset(sim.visited),
        final_pose=sim.pose,
        final_markers=tuple(tuple(row) for row in sim.markers) if sim.markers is not None else None,
        condition_outcomes={k: frozenset(v) for k, v in sim.cond_outcomes.items()},
    )


def check_solves(code: Program, task: TaskSpec, step_cap: int = DEFAULT_STEP_CAP) -> bool:
    """True iff the code run ends with success status."""
    return run(code, task, step_cap).status == SUCCESS
