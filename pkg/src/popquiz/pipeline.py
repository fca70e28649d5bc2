"""End-to-end quiz generation: sketch selection, instantiation, blanking.

Stage 1 picks a target sketch between the student's sketch and the
solution's sketch; Stage 2 turns it into a fresh (task, code) pair by
seeding from a code reduction, mutating, and synthesizing puzzles; Stage
3 blanks the last action leaf and wraps the fixed multiple-choice set.

Besides the full algorithm, three ablation variants are available: one
that always targets the full solution sketch, one that stays exactly one
hop from the student sketch, and one that skips mutation and uses a
reduction of the solution code directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .code_dsl import (
    ACTIONS,
    Action,
    Blank,
    HOC_ACTIONS,
    If,
    IfElse,
    KAREL_ACTIONS,
    MARKER_CONDITIONS,
    PATH_CONDITIONS,
    Program,
    REPEAT_MAX,
    REPEAT_MIN,
    Repeat,
    RepeatUntil,
    Stmt,
    While,
    code_distance,
    iter_nodes,
    parse,
    serialize,
)
from .emulator import TaskSpec, check_solves, parse_task, serialize_task
from .mutation import MutationParams, NoCandidates, mutate
from .reduction import red_codes
from .sketch import (
    Sketch,
    abstract,
    levels,
    one_hop_neighbors,
    parse_sketch,
    serialize_sketch,
    sketch_distance,
    substructures,
)
from .task_synth import SynthParams, SynthesisFailure, synthesize_tasks

VARIANTS = ("pquizsyn", "fullhop", "onehop", "redcode")

_CHOICE_ORDER = ACTIONS  # move, turnLeft, turnRight, pickMarker, putMarker


class NoLeaf(Exception):
    """The code has no action leaf to blank."""


class AmbiguousQuiz(Exception):
    """More than one answer choice solves the quiz task."""


class DegenerateQuiz(Exception):
    """No answer choice solves the quiz task."""


class PipelineFailure(Exception):
    """Every candidate was rejected; carries stage-level diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class Provenance:
    variant: str
    sketch: Sketch
    lhat: int
    seed_code: Program
    full_code: Program


@dataclass(frozen=True)
class Quiz:
    task: TaskSpec
    blanked_code: Program
    choices: tuple[str, ...]
    correct_index: int
    provenance: Provenance
    quality: float = 0.0


@dataclass(frozen=True)
class PipelineParams:
    mutation: MutationParams = field(default_factory=MutationParams)
    synth: SynthParams = field(default_factory=SynthParams)
    max_quizzes: int = 5
    rng_seed: int = 0


def get_sketch(student: Sketch, solution: Sketch) -> tuple[Sketch, int]:
    """Stage 1: the substructure to instantiate, and the hop radius used.

    The radius is the smallest positive l at which the student sketch's
    l-neighborhood meets the solution's substructures; among the
    substructures inside that neighborhood the one closest to the full
    solution sketch wins (deeper, then lexicographically earlier, on
    ties).
    """
    subs = substructures(solution)
    dists = {s: sketch_distance(student, s) for s in subs}
    lhat = max(1, min(dists.values()))
    eligible = [s for s in subs if dists[s] <= lhat]
    chosen = min(
        eligible,
        key=lambda s: (sketch_distance(s, solution), -levels(s), serialize_sketch(s)),
    )
    return chosen, lhat


def instantiate_sketch(
    sketch: Sketch, rng: random.Random, store: frozenset[str], kind: str
) -> Program:
    """A random grammar-valid code whose abstraction equals ``sketch``."""
    actions = tuple(a for a in ACTIONS if a in store)
    conditions = tuple(PATH_CONDITIONS) + (
        tuple(MARKER_CONDITIONS) if kind == "karel" else ()
    )

    from .sketch import SIf, SIfElse, SNode, SRepeat, SRepeatUntil, SWhile

    def fill(body: tuple[SNode, ...]) -> tuple[Stmt, ...]:
        out: list[Stmt] = []

        def some_actions(at_least_one: bool) -> list[Stmt]:
            k = rng.choice((1, 2)) if at_least_one else rng.choice((0, 0, 1))
            return [Action(rng.choice(actions)) for _ in range(k)]

        if not body:
            return tuple(some_actions(True))
        for node in body:
            out.extend(some_actions(False))
            if isinstance(node, SRepeat):
                out.append(Repeat(rng.randint(REPEAT_MIN, REPEAT_MAX), fill(node.body)))
            elif isinstance(node, SRepeatUntil):
                out.append(RepeatUntil(fill(node.body)))
            elif isinstance(node, SWhile):
                out.append(While(rng.choice(conditions), fill(node.body)))
            elif isinstance(node, SIf):
                out.append(If(rng.choice(conditions), fill(node.body)))
            elif isinstance(node, SIfElse):
                out.append(IfElse(rng.choice(conditions), fill(node.then_body), fill(node.else_body)))
        return tuple(out)

    body = fill(sketch.body)
    # actions after a trailing RepeatUntil would be ungrammatical; fill()
    # never appends after the last construct, so only prefix gaps occur
    program = Program(body)
    assert abstract(program) == sketch
    return program


def choose_seed(
    solution: Program,
    sketch: Sketch,
    rng: random.Random,
    store: frozenset[str] | None = None,
    kind: str = "hoc",
) -> Program:
    """Stage 2 seed: a reduction if one exists, else a fallback.

    The fallback is the solution itself when the sketch is the full
    solution sketch, or a random instantiation when the sketch is not a
    substructure at all (the one-hop variant's situation).
    """
    sol_sketch = abstract(solution)
    if sketch in substructures(sol_sketch):
        reductions = sorted(red_codes(solution, sketch), key=serialize)
        if reductions:
            return rng.choice(reductions)
        if sketch == sol_sketch:
            return solution
        raise PipelineFailure(
            "substructure admits no reduction", {"stage": "choose_seed"}
        )
    if store is None:
        store = frozenset(HOC_ACTIONS if kind == "hoc" else KAREL_ACTIONS)
    return instantiate_sketch(sketch, rng, store, kind)


def blank_last_leaf(code: Program) -> tuple[Program, str]:
    """Replace the last action leaf (left-to-right order) with a blank."""
    last_path = None
    last_kind = None
    for path, node in iter_nodes(code):
        if isinstance(node, Action):
            last_path = path
            last_kind = node.kind
    if last_path is None:
        raise NoLeaf("code has no action leaf")

    def rebuild(body: tuple[Stmt, ...], prefix: tuple[int, ...]) -> tuple[Stmt, ...]:
        out = []
        for i, stmt in enumerate(body):
            here = prefix + (i,)
            if here == last_path:
                out.append(Blank())
                continue
            if isinstance(stmt, Repeat):
                out.append(Repeat(stmt.count, rebuild(stmt.body, here)))
            elif isinstance(stmt, RepeatUntil):
                out.append(RepeatUntil(rebuild(stmt.body, here)))
            elif isinstance(stmt, While):
                out.append(While(stmt.cond, rebuild(stmt.body, here)))
            elif isinstance(stmt, If):
                out.append(If(stmt.cond, rebuild(stmt.body, here)))
            elif isinstance(stmt, IfElse):
                out.append(
                    IfElse(
                        stmt.cond,
                        rebuild(stmt.then_body, here + (0,)),
                        rebuild(stmt.else_body, here + (1,)),
                    )
                )
            else:
                out.append(stmt)
        return tuple(out)

    return Program(rebuild(code.body, ())), last_kind


def _substitute_blank(code: Program, action: str) -> Program:
    def rebuild(body: tuple[Stmt, ...]) -> tuple[Stmt, ...]:
        out = []
        for stmt in body:
            if isinstance(stmt, Blank):
                out.append(Action(action))
            elif isinstance(stmt, Repeat):
                out.append(Repeat(stmt.count, rebuild(stmt.body)))
            elif isinstance(stmt, RepeatUntil):
                out.append(RepeatUntil(rebuild(stmt.body)))
            elif isinstance(stmt, While):
                out.append(While(stmt.cond, rebuild(stmt.body)))
            elif isinstance(stmt, If):
                out.append(If(stmt.cond, rebuild(stmt.body)))
            elif isinstance(stmt, IfElse):
                out.append(IfElse(stmt.cond, rebuild(stmt.then_body), rebuild(stmt.else_body)))
            else:
                out.append(stmt)
        return tuple(out)

    return Program(rebuild(code.body))


def quiz_choices(task: TaskSpec) -> tuple[str, ...]:
    """The fixed, ordered answer set: the action subset of the store."""
    return tuple(a for a in _CHOICE_ORDER if a in task.store)


def assemble_quiz(
    task: TaskSpec, full_code: Program, provenance: Provenance, quality: float = 0.0
) -> Quiz:
    """Stage 3: blank the last leaf and verify exactly one choice works."""
    if not check_solves(full_code, task):
        raise ValueError("full code must solve the quiz task")
    blanked, answer = blank_last_leaf(full_code)
    choices = quiz_choices(task)
    solving = [
        i for i, choice in enumerate(choices)
        if check_solves(_substitute_blank(blanked, choice), task)
    ]
    if len(solving) > 1:
        raise AmbiguousQuiz(f"{len(solving)} of {len(choices)} choices solve the task")
    if not solving:
        raise DegenerateQuiz("no choice solves the task")  # unreachable given the precheck
    assert choices[solving[0]] == answer
    return Quiz(
        task=task,
        blanked_code=blanked,
        choices=choices,
        correct_index=solving[0],
        provenance=provenance,
        quality=quality,
    )


def _stage1(variant: str, student: Sketch, solution_sketch: Sketch, task_kind: str, rng: random.Random) -> tuple[Sketch, int]:
    if variant in ("pquizsyn", "redcode"):
        return get_sketch(student, solution_sketch)
    if variant == "fullhop":
        return solution_sketch, max(1, sketch_distance(student, solution_sketch))
    if variant == "onehop":
        neighbors = one_hop_neighbors(
            student,
            allow_while=(task_kind == "karel"),
            allow_until=(task_kind == "hoc"),
        )
        if not neighbors:
            raise PipelineFailure("student sketch has no one-hop neighbors", {"stage": "stage1"})
        subs = set(substructures(solution_sketch))
        preferred = [s for s in neighbors if s in subs]
        if preferred:
            chosen = min(
                preferred,
                key=lambda s: (sketch_distance(s, solution_sketch), serialize_sketch(s)),
            )
        else:
            chosen = rng.choice(sorted(neighbors, key=serialize_sketch))
        return chosen, 1
    raise ValueError(f"unknown variant {variant!r}")


def generate_popquiz(
    task_in: TaskSpec,
    solution: Program,
    attempt: Program,
    variant: str = "pquizsyn",
    params: PipelineParams | None = None,
) -> list[Quiz]:
    """Run all three stages, returning up to ``max_quizzes`` valid quizzes."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {', '.join(VARIANTS)}")
    params = params or PipelineParams()
    rng = random.Random(params.rng_seed)
    diagnostics: dict = {"variant": variant, "synth_failures": 0, "ambiguous": 0}

    if not check_solves(solution, task_in):
        raise PipelineFailure("solution does not solve the input task", {"stage": "precheck"})

    student_sketch = abstract(attempt)
    solution_sketch = abstract(solution)
    quiz_sketch, lhat = _stage1(variant, student_sketch, solution_sketch, task_in.kind, rng)
    diagnostics["sketch"] = serialize_sketch(quiz_sketch)
    diagnostics["lhat"] = lhat

    # stage 2(i): candidate codes
    if variant == "redcode":
        pool = sorted(red_codes(solution, quiz_sketch), key=serialize)
        if not pool:
            raise PipelineFailure(
                "no reduction of the solution matches the stage-1 sketch",
                {**diagnostics, "stage": "redcode"},
            )
        rng.shuffle(pool)
        seed = pool[0]
        candidates = pool
    else:
        seed = choose_seed(solution, quiz_sketch, rng, task_in.store, task_in.kind)
        try:
            candidates = mutate(
                seed,
                quiz_sketch,
                solution,
                replace(params.mutation, rng_seed=rng.randrange(2**62)),
                store=task_in.store,
            )
        except NoCandidates as exc:
            raise PipelineFailure(str(exc), {**diagnostics, "stage": "mutate"})

    # stage 2(ii) + stage 3, lazily until enough quizzes survive
    quizzes: list[Quiz] = []
    enough = params.max_quizzes * 2
    for candidate in candidates:
        if len(quizzes) >= enough:
            break
        synth = replace(
            params.synth, rng_seed=rng.randrange(2**62), kind=task_in.kind
        )
        try:
            tasks = synthesize_tasks(candidate, synth)
        except SynthesisFailure:
            diagnostics["synth_failures"] += 1
            continue
        provenance = Provenance(
            variant=variant,
            sketch=quiz_sketch,
            lhat=lhat,
            seed_code=candidate if variant == "redcode" else seed,
            full_code=candidate,
        )
        for task, quality in tasks:
            if len(quizzes) >= enough:
                break
            try:
                quiz = assemble_quiz(task, candidate, provenance, quality)
            except AmbiguousQuiz:
                diagnostics["ambiguous"] += 1
                continue
            except NoLeaf:
                break
            if variant == "pquizsyn":
                assert code_distance(candidate, solution) >= params.mutation.theta_conceal
            quizzes.append(quiz)

    if not quizzes:
        raise PipelineFailure("all candidates were rejected", diagnostics)
    quizzes.sort(key=lambda q: -q.quality)
    return quizzes[: params.max_quizzes]


def quiz_to_text(quiz: Quiz) -> str:
    """Single-document quiz serialization (stable field names)."""
    lines = [
        f"variant:{quiz.provenance.variant}",
        f"sketch:{serialize_sketch(quiz.provenance.sketch)}",
        f"lhat:{quiz.provenance.lhat}",
        f"seed:{serialize(quiz.provenance.seed_code)}",
        f"code:{serialize(quiz.blanked_code)}",
        "choices:" + ",".join(quiz.choices),
        f"correct:{quiz.correct_index}",
        "task:",
        serialize_task(quiz.task).rstrip("\n"),
    ]
    return "\n".join(lines) + "\n"


def quiz_from_text(text: str) -> Quiz:
    lines = text.splitlines()
    fields: dict[str, str] = {}
    task_text = None
    for i, line in enumerate(lines):
        if line == "task:":
            task_text = "\n".join(lines[i + 1:]) + "\n"
            break
        key, _, value = line.partition(":")
        fields[key] = value
    if task_text is None:
        raise ValueError("quiz document has no task block")
    task = parse_task(task_text)
    blanked = parse(fields["code"], allow_blank=True)
    full_code = _substitute_blank(blanked, fields["choices"].split(",")[int(fields["correct"])])
    provenance = Provenance(
        variant=fields["variant"],
        sketch=parse_sketch(fields["sketch"]),
        lhat=int(fields["lhat"]),
        seed_code=parse(fields["seed"]),
        full_code=full_code,
    )
    return Quiz(
        task=task,
        blanked_code=blanked,
        choices=tuple(fields["choices"].split(",")),
        correct_index=int(fields["correct"]),
        provenance=provenance,
    )
