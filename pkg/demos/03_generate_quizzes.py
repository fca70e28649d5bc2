"""The full pipeline: adaptive pop quizzes for different student attempts.

Run with: python3 demos/03_generate_quizzes.py
"""

from pathlib import Path

from popquiz import (
    PipelineParams,
    generate_popquiz,
    parse,
    parse_task,
    quiz_to_text,
    serialize,
    serialize_sketch,
)

DATA = Path(__file__).parent.parent / "data" / "tasks"

task = parse_task((DATA / "hoc-maze.task").read_text())
solution = parse((DATA / "hoc-maze.solution").read_text().strip())

# Four canonical kinds of struggling attempts: action-only, a construct
# subset, the right structure with wrong details, and an overshoot.
attempts = {
    "actions only": "Run{move;move;turnLeft}",
    "construct subset": "Run{RepeatUntil(goal){move;turnLeft}}",
    "right structure": "Run{RepeatUntil(goal){IfElse(pathLeft){turnRight}{IfElse(pathAhead){move}{turnLeft}}}}",
    "overshoot": "Run{RepeatUntil(goal){IfElse(pathAhead){If(pathLeft){move}}{IfElse(pathLeft){turnLeft}{turnRight}}}}",
}

for label, attempt_text in attempts.items():
    attempt = parse(attempt_text)
    quizzes = generate_popquiz(task, solution, attempt, "pquizsyn",
                               PipelineParams(max_quizzes=1, rng_seed=99))
    quiz = quizzes[0]
    print(f"=== {label}")
    print("  attempt:      ", attempt_text)
    print("  target sketch:", serialize_sketch(quiz.provenance.sketch),
          f"(hop radius {quiz.provenance.lhat})")
    print("  quiz code:    ", serialize(quiz.blanked_code))
    print("  choices:      ", ", ".join(quiz.choices),
          f"-> answer #{quiz.correct_index}")
    print()

# A quiz serializes to a single text document (grid included).
print("full quiz document for the last attempt:")
print(quiz_to_text(quiz))
