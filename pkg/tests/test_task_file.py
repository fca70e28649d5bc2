import pytest

from popquiz.emulator import TaskError, check_solves, parse_task, serialize_task


def test_reference_tasks_round_trip(hoc_task, karel_task):
    for task in (hoc_task, karel_task):
        assert parse_task(serialize_task(task)) == task


def test_reference_solutions_solve(cstar, hoc_task, karel_task, karel_solution):
    assert check_solves(cstar, hoc_task)
    assert check_solves(karel_solution, karel_task)


def test_malformed_tasks_report_lines():
    with pytest.raises(TaskError) as err:
        parse_task("kind:hoc\nsize:3\n###\n#.#\n##\nagent:1,1,N\nstore:move\nmaxblocks:3\n")
    assert err.value.line == 5  # short grid row

    with pytest.raises(TaskError):
        parse_task("kind:bogus\nsize:2\n..\n..\nagent:0,0,N\nstore:move\nmaxblocks:2\n")

    with pytest.raises(TaskError):  # marker digits in a hoc grid
        parse_task("kind:hoc\nsize:2\n.2\n.+\nagent:0,0,N\nstore:move\nmaxblocks:2\n")

    with pytest.raises(TaskError):  # no goal
        parse_task("kind:hoc\nsize:2\n..\n..\nagent:0,0,N\nstore:move\nmaxblocks:2\n")

    with pytest.raises(TaskError):  # agent on a wall
        parse_task("kind:hoc\nsize:2\n#.\n.+\nagent:0,0,N\nstore:move\nmaxblocks:2\n")

    with pytest.raises(TaskError):  # karel store cannot hold RepeatUntil
        parse_task(
            "kind:karel\nsize:2\n..\n..\nagent:0,0,N\n..\n..\nstore:move,RepeatUntil\nmaxblocks:2\n"
        )

    with pytest.raises(TaskError):  # post walls must match
        parse_task(
            "kind:karel\nsize:2\n#.\n..\nagent:0,1,N\n..\n..\nstore:move\nmaxblocks:2\n"
        )
