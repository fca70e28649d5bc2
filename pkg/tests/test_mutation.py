import itertools

import pytest

from popquiz.code_dsl import (
    Action,
    HOC_ACTIONS,
    Program,
    code_distance,
    metrics,
    parse,
    serialize,
)
from popquiz.mutation import MutationParams, NoCandidates, has_redundancy, mutate
from popquiz.sketch import abstract, parse_sketch


class TestReferenceExample:
    def test_expected_candidates_present(self, cstar):
        seed = parse("Run{RepeatUntil(goal){move}}")
        target = parse_sketch("Run{RepeatUntil(goal)}")
        # a budget large enough to keep the whole feasible set
        params = MutationParams(max_candidates=4096, rng_seed=0)
        texts = {serialize(c) for c in mutate(seed, target, cstar, params)}
        assert "Run{RepeatUntil(goal){move;move}}" in texts
        assert "Run{RepeatUntil(goal){turnLeft;move}}" in texts
        assert "Run{RepeatUntil(goal){turnLeft;turnRight}}" not in texts

    def test_degenerate_constraints_admit_seed(self, cstar):
        seed = parse("Run{RepeatUntil(goal){move}}")
        target = parse_sketch("Run{RepeatUntil(goal)}")
        params = MutationParams(delta_size=0, theta_conceal=0, max_candidates=4096)
        candidates = mutate(seed, target, cstar, params)
        assert seed in candidates

    def test_karel_condition_flip_admitted(self):
        seed = parse("Run{While(markersPresent){pickMarker}}")
        target = parse_sketch("Run{While(B)}")
        solution = parse("Run{While(markersPresent){pickMarker;move}}")
        params = MutationParams(theta_conceal=1, max_candidates=4096)
        texts = {serialize(c) for c in mutate(seed, target, solution, params)}
        assert any("While(noMarkersPresent)" in t for t in texts)
        # the path class is disjoint from the marker class
        assert not any("While(pathAhead)" in t for t in texts)


class TestInvariants:
    def test_sketch_preserved_and_conceal_bound(self, cstar):
        seed = parse("Run{RepeatUntil(goal){move}}")
        target = parse_sketch("Run{RepeatUntil(goal)}")
        params = MutationParams(rng_seed=99)
        for candidate in mutate(seed, target, cstar, params):
            assert abstract(candidate) == target
            assert code_distance(candidate, cstar) >= params.theta_conceal
            size = metrics(candidate).size
            assert abs(size - 2) <= params.delta_size

    def test_deterministic(self, cstar):
        seed = parse("Run{RepeatUntil(goal){move}}")
        target = parse_sketch("Run{RepeatUntil(goal)}")
        a = mutate(seed, target, cstar, MutationParams(rng_seed=5))
        b = mutate(seed, target, cstar, MutationParams(rng_seed=5))
        assert a == b
        # below the cap the candidate set is seed-independent; only the
        # tie order among equal distances moves
        full_a = mutate(seed, target, cstar, MutationParams(max_candidates=100000, rng_seed=5))
        full_c = mutate(seed, target, cstar, MutationParams(max_candidates=100000, rng_seed=6))
        assert {serialize(x) for x in full_a} == {serialize(x) for x in full_c}

    def test_ordering_by_descending_distance(self, cstar):
        seed = parse("Run{RepeatUntil(goal){move}}")
        target = parse_sketch("Run{RepeatUntil(goal)}")
        candidates = mutate(seed, target, cstar, MutationParams(rng_seed=1))
        dists = [code_distance(c, cstar) for c in candidates]
        assert dists == sorted(dists, reverse=True)

    def test_unsatisfiable_raises(self, cstar):
        seed = parse("Run{RepeatUntil(goal){move}}")
        target = parse_sketch("Run{RepeatUntil(goal)}")
        with pytest.raises(NoCandidates):
            mutate(seed, target, cstar, MutationParams(theta_conceal=99))

    def test_brute_force_equivalence_small_instance(self, cstar):
        # seed Run{RepeatUntil(goal){move}}, HOC store, band size 1..3:
        # feasible set = all loop bodies over the actions (plus nothing
        # outside the loop at sizes <= 2 extra) matching the constraints
        seed = parse("Run{RepeatUntil(goal){move}}")
        target = parse_sketch("Run{RepeatUntil(goal)}")
        params = MutationParams(delta_size=1, theta_conceal=2, max_candidates=100000)
        got = {serialize(c) for c in mutate(seed, target, cstar, params)}

        expected = set()
        for prefix_len in range(0, 2):
            for prefix in itertools.product(HOC_ACTIONS, repeat=prefix_len):
                for body_len in range(1, 3 - prefix_len + 1):
                    if prefix_len + body_len + 1 not in (1, 2, 3):
                        continue
                    for body in itertools.product(HOC_ACTIONS, repeat=body_len):
                        from popquiz.code_dsl import RepeatUntil

                        program = Program(
                            tuple(Action(a) for a in prefix)
                            + (RepeatUntil(tuple(Action(a) for a in body)),)
                        )
                        if has_redundancy(program):
                            continue
                        if code_distance(program, cstar) < 2:
                            continue
                        size = metrics(program).size
                        if abs(size - 2) > 1:
                            continue
                        expected.add(serialize(program))
        assert got == expected
