import random

from popquiz.code_dsl import code_distance, parse, serialize, validate
from popquiz.nextstep import next_step_edit
from popquiz.treedist import edit_mapping
from popquiz.code_dsl import to_ltree

from oracles import random_code


def test_construct_edit_preferred(cstar):
    # the optimal script from Run{move} inserts RepeatUntil plus the two
    # IfElse nodes; a construct edit must win over touching action leaves
    hint = next_step_edit(parse("Run{move}"), cstar)
    assert serialize(hint) == "Run{RepeatUntil(goal){move}}"


def test_construct_edit_exists_in_script(cstar):
    mapping = edit_mapping(to_ltree(parse("Run{move}")), to_ltree(cstar))
    inserted_labels = {"RepeatUntil(goal)", "IfElse(pathAhead)", "IfElse(pathLeft)"}
    got = set()
    for path in mapping.inserted:
        node = to_ltree(cstar)
        for i in path:
            node = node.children[i]
        got.add(node.label)
    assert inserted_labels <= got


def test_edit_strictly_decreases_distance(cstar):
    attempts = [
        "Run{move}",
        "Run{RepeatUntil(goal){move}}",
        "Run{RepeatUntil(goal){IfElse(pathLeft){move}{turnLeft}}}",
        "Run{turnLeft;turnLeft;move}",
    ]
    for text in attempts:
        attempt = parse(text)
        hint = next_step_edit(attempt, cstar)
        validate(hint)
        assert code_distance(hint, cstar) < code_distance(attempt, cstar)


def test_random_attempts_move_toward_solution(cstar, karel_solution):
    rng = random.Random(77)
    for solution, kind in ((cstar, "hoc"), (karel_solution, "karel")):
        for _ in range(25):
            attempt = random_code(rng, max_size=6, kind=kind)
            if attempt == solution:
                continue
            hint = next_step_edit(attempt, solution)
            validate(hint)
            assert code_distance(hint, solution) < code_distance(attempt, solution)


def test_identical_attempt_falls_back_to_solution(cstar):
    assert next_step_edit(cstar, cstar) == cstar
