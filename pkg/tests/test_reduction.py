import random

import pytest

from popquiz.code_dsl import metrics, parse, serialize
from popquiz.reduction import InvalidTarget, red_codes
from popquiz.sketch import abstract, parse_sketch, substructures

from oracles import oracle_red_codes, random_code


class TestReferenceExample:
    def test_three_codes(self, cstar):
        target = parse_sketch("Run{RepeatUntil(goal)}")
        expected = {
            parse("Run{RepeatUntil(goal){move}}"),
            parse("Run{RepeatUntil(goal){turnRight}}"),
            parse("Run{RepeatUntil(goal){turnLeft}}"),
        }
        assert red_codes(cstar, target) == expected


class TestEdgeCases:
    def test_single_action_cannot_reduce(self):
        assert red_codes(parse("Run{move}"), parse_sketch("Run")) == set()

    def test_two_actions(self):
        result = red_codes(parse("Run{move;turnLeft}"), parse_sketch("Run"))
        assert result == {parse("Run{move}"), parse("Run{turnLeft}")}

    def test_invalid_target_raises(self, cstar):
        with pytest.raises(InvalidTarget):
            red_codes(cstar, parse_sketch("Run{While(B)}"))


class TestProperties:
    def test_smaller_and_sketch_preserving(self, cstar):
        for target in substructures(abstract(cstar)):
            for reduced in red_codes(cstar, target):
                assert metrics(reduced).size < metrics(cstar).size
                assert abstract(reduced) == target

    def test_closure(self, cstar):
        target = parse_sketch("Run{RepeatUntil(goal)}")
        first = red_codes(cstar, target)
        for code in first:
            for deeper in red_codes(code, target):
                assert metrics(deeper).size < metrics(code).size
                assert abstract(deeper) == target

    def test_matches_removal_fixpoint_oracle(self):
        rng = random.Random(31)
        checked = 0
        while checked < 25:
            code = random_code(rng, max_size=5)
            if metrics(code).size > 6:
                continue
            for target in substructures(abstract(code)):
                assert red_codes(code, target) == oracle_red_codes(code, target), serialize(code)
            checked += 1
