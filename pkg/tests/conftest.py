import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from popquiz.code_dsl import parse
from popquiz.emulator import parse_task

DATA = Path(__file__).parent.parent / "data" / "tasks"

CSTAR_TEXT = "Run{RepeatUntil(goal){IfElse(pathAhead){move}{IfElse(pathLeft){turnLeft}{turnRight}}}}"


@pytest.fixture(scope="session")
def cstar():
    return parse(CSTAR_TEXT)


@pytest.fixture(scope="session")
def hoc_task():
    return parse_task((DATA / "hoc-maze.task").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def karel_task():
    return parse_task((DATA / "karel-line.task").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def karel_solution():
    return parse((DATA / "karel-line.solution").read_text(encoding="utf-8").strip())
