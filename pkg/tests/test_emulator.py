import random

import pytest

from popquiz.code_dsl import parse
from popquiz.emulator import (
    CRASH,
    INCOMPLETE,
    Pose,
    SUCCESS,
    SizeViolation,
    StoreViolation,
    TIMEOUT,
    TaskSpec,
    check_solves,
    run,
)

from oracles import random_code, random_task


def tiny_hoc(goal=(0, 1)):
    return TaskSpec(
        kind="hoc",
        size=2,
        walls=((False, False), (False, False)),
        start=Pose(0, 0, "E"),
        store=frozenset({"move", "turnLeft", "turnRight", "Repeat", "RepeatUntil", "If", "IfElse"}),
        max_blocks=10,
        goal=goal,
    )


def tiny_karel(pre, post, agent_post=None):
    return TaskSpec(
        kind="karel",
        size=2,
        walls=((False, False), (False, False)),
        start=Pose(0, 0, "E"),
        store=frozenset({"move", "turnLeft", "turnRight", "pickMarker", "putMarker", "Repeat", "While", "If", "IfElse"}),
        max_blocks=10,
        pre_markers=pre,
        post_markers=post,
        agent_post=agent_post,
    )


class TestRun:
    def test_forced_geometry_success(self):
        result = run(parse("Run{move}"), tiny_hoc())
        assert result.status == SUCCESS
        assert result.steps_used == 1

    def test_loop_with_agent_already_on_goal(self):
        task = tiny_hoc(goal=(0, 0))
        result = run(parse("Run{RepeatUntil(goal){move}}"), task)
        assert result.status == SUCCESS
        assert result.steps_used == 0

    def test_pick_on_empty_cell_crashes(self):
        task = tiny_karel(((0, 0), (0, 0)), ((0, 0), (0, 0)))
        result = run(parse("Run{pickMarker}"), task)
        assert result.status == CRASH

    def test_put_at_cap_crashes(self):
        task = tiny_karel(((9, 0), (0, 0)), ((9, 0), (0, 0)))
        assert run(parse("Run{putMarker}"), task).status == CRASH

    def test_move_into_wall_crashes(self):
        task = TaskSpec(
            kind="hoc",
            size=2,
            walls=((False, True), (False, False)),
            start=Pose(0, 0, "E"),
            store=frozenset({"move"}),
            max_blocks=5,
            goal=(1, 0),
        )
        assert run(parse("Run{move}"), task).status == CRASH

    def test_nonprogressing_loop_times_out(self):
        result = run(parse("Run{RepeatUntil(goal){turnLeft}}"), tiny_hoc())
        assert result.status == TIMEOUT
        assert result.steps_used == 1000

    def test_karel_success_needs_markers_and_pose(self):
        pre = ((1, 0), (0, 0))
        post = ((0, 0), (0, 0))
        task = tiny_karel(pre, post, agent_post=Pose(0, 1, "E"))
        assert run(parse("Run{pickMarker;move}"), task).status == SUCCESS
        assert run(parse("Run{pickMarker;move;move}"), task).status == CRASH
        # wrong final pose
        assert run(parse("Run{pickMarker;move;turnLeft}"), task).status == INCOMPLETE
        # markers untouched
        assert run(parse("Run{move}"), task).status == INCOMPLETE

    def test_store_violation(self):
        task = tiny_hoc()
        with pytest.raises(StoreViolation):
            run(parse("Run{pickMarker}"), task)
        with pytest.raises(StoreViolation):
            run(parse("Run{If(markersPresent){move}}"), task)

    def test_size_violation(self):
        task = TaskSpec(
            kind="hoc",
            size=2,
            walls=((False, False), (False, False)),
            start=Pose(0, 0, "E"),
            store=frozenset({"move"}),
            max_blocks=1,
            goal=(0, 1),
        )
        with pytest.raises(SizeViolation):
            run(parse("Run{move;move}"), task)

    def test_check_solves(self, cstar, hoc_task):
        assert check_solves(cstar, hoc_task)
        assert not check_solves(parse("Run{turnLeft}"), hoc_task)


class TestDeterminismAndConservation:
    def test_repeated_runs_identical(self):
        rng = random.Random(17)
        for _ in range(200):
            kind = rng.choice(["hoc", "karel"])
            task = random_task(rng, kind=kind)
            code = random_code(rng, max_size=6, kind=kind)
            try:
                r1 = run(code, task, step_cap=300)
                r2 = run(code, task, step_cap=300)
            except (StoreViolation, SizeViolation):
                continue
            assert r1 == r2

    def test_marker_conservation(self):
        rng = random.Random(19)
        for _ in range(150):
            task = random_task(rng, kind="karel")
            code = random_code(rng, max_size=6, kind="karel")
            result = run(code, task, step_cap=300)
            picks = sum(1 for _, a in result.trace if a == "pickMarker")
            puts = sum(1 for _, a in result.trace if a == "putMarker")
            if result.status == CRASH:
                # the final crashing action had no effect
                last = result.trace[-1][1]
                if last == "pickMarker":
                    picks -= 1
                elif last == "putMarker":
                    puts -= 1
            total_before = sum(map(sum, task.pre_markers))
            total_after = sum(map(sum, result.final_markers))
            assert total_after == total_before + puts - picks

    def test_trace_replay_reproduces_markers(self):
        rng = random.Random(23)
        for _ in range(60):
            task = random_task(rng, kind="karel")
            code = random_code(rng, max_size=5, kind="karel")
            result = run(code, task, step_cap=300)
            grid = [list(row) for row in task.pre_markers]
            effective = result.trace[:-1] if result.status == CRASH else result.trace
            for pose, action in effective:
                if action == "pickMarker":
                    grid[pose.row][pose.col] -= 1
                elif action == "putMarker":
                    grid[pose.row][pose.col] += 1
            assert tuple(tuple(row) for row in grid) == result.final_markers

    def test_steps_never_exceed_cap(self):
        rng = random.Random(29)
        for _ in range(100):
            task = random_task(rng, kind="hoc")
            code = random_code(rng, max_size=6, kind="hoc")
            result = run(code, task, step_cap=50)
            assert result.steps_used <= 50
            if result.status == TIMEOUT and result.steps_used < 50:
                # only a loop that executes no actions can stall before the
                # action cap; the tick guard then reports the timeout
                assert "RepeatUntil" in str(code) or "While" in str(code)
