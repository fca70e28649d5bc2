import random

from hypothesis import given, settings
from hypothesis import strategies as st

from popquiz.code_dsl import parse
from popquiz.pipeline import instantiate_sketch
from popquiz.sketch import (
    Sketch,
    abstract,
    levels,
    one_hop_neighbors,
    parse_sketch,
    serialize_sketch,
    sketch_distance,
    substructures,
    to_ltree,
)

from oracles import brute_force_tree_distance, random_sketch

FIG2 = "Run{RepeatUntil(goal){IfElse(B){}{IfElse(B)}}}"


class TestAbstract:
    def test_actions_collapse_to_bare_run(self):
        assert abstract(parse("Run{move;turnLeft}")) == Sketch(())

    def test_reference_solution_sketch(self, cstar):
        assert serialize_sketch(abstract(cstar)) == FIG2

    def test_karel_while(self):
        code = parse("Run{While(markersPresent){pickMarker;move}}")
        assert serialize_sketch(abstract(code)) == "Run{While(B)}"

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10**9))
    def test_stable_under_reinstantiation(self, seed):
        rng = random.Random(seed)
        sketch = random_sketch(rng)
        store = frozenset({"move", "turnLeft", "turnRight"})
        code = instantiate_sketch(sketch, rng, store, "hoc")
        assert abstract(code) == sketch


class TestSketchText:
    def test_round_trip(self):
        for text in ("Run", "Run{RepeatUntil(goal)}", FIG2, "Run{While(B){If(B)}}"):
            assert serialize_sketch(parse_sketch(text)) == text

    def test_empty_bodies_optional(self):
        assert parse_sketch("Run{}") == parse_sketch("Run")
        assert parse_sketch("Run{IfElse(B){}{}}") == parse_sketch("Run{IfElse(B)}")


class TestSketchDistance:
    def test_identity(self):
        s = parse_sketch(FIG2)
        assert sketch_distance(s, s) == 0

    def test_single_insertion(self):
        assert sketch_distance(parse_sketch("Run"), parse_sketch("Run{RepeatUntil(goal)}")) == 1

    def test_relabel(self):
        s1 = parse_sketch("Run{RepeatUntil(goal){While(B)}}")
        s2 = parse_sketch("Run{RepeatUntil(goal){IfElse(B)}}")
        assert sketch_distance(s1, s2) == 1

    def test_matches_brute_force_on_small_sketches(self):
        rng = random.Random(11)
        checked = 0
        while checked < 50:
            a = random_sketch(rng, max_levels=3)
            b = random_sketch(rng, max_levels=3)
            if to_ltree(a).size() > 4 or to_ltree(b).size() > 4:
                continue
            assert sketch_distance(a, b) == brute_force_tree_distance(to_ltree(a), to_ltree(b))
            checked += 1


class TestSubstructures:
    def test_bare_run(self):
        assert substructures(Sketch(())) == [Sketch(())]

    def test_figure_sketch_has_exactly_four(self, cstar):
        subs = substructures(abstract(cstar))
        assert [serialize_sketch(s) for s in subs] == [
            "Run",
            "Run{RepeatUntil(goal)}",
            "Run{RepeatUntil(goal){IfElse(B)}}",
            FIG2,
        ]

    def test_depth_truncations(self):
        subs = substructures(parse_sketch("Run{While(B){If(B)}}"))
        assert [serialize_sketch(s) for s in subs] == [
            "Run",
            "Run{While(B)}",
            "Run{While(B){If(B)}}",
        ]

    @settings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=10**9))
    def test_shape_properties(self, seed):
        sketch = random_sketch(random.Random(seed))
        subs = substructures(sketch)
        assert len(subs) == levels(sketch)
        assert subs[0] == Sketch(())
        assert subs[-1] == sketch
        # distances to the full sketch never increase along the list
        dists = [sketch_distance(s, sketch) for s in subs]
        assert dists == sorted(dists, reverse=True)
        # successive substructures differ by exactly the next level's nodes
        for a, b in zip(subs, subs[1:]):
            gap = to_ltree(b).size() - to_ltree(a).size()
            assert sketch_distance(a, b) == gap


class TestOneHop:
    def test_neighbors_are_at_distance_one(self):
        rng = random.Random(23)
        for _ in range(20):
            sketch = random_sketch(rng, max_levels=3)
            for neighbor in one_hop_neighbors(sketch):
                assert sketch_distance(sketch, neighbor) == 1

    def test_bare_run_has_insertions(self):
        neighbors = one_hop_neighbors(Sketch(()))
        texts = {serialize_sketch(s) for s in neighbors}
        assert "Run{RepeatUntil(goal)}" in texts
        assert "Run{Repeat(X)}" in texts
