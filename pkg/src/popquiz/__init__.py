"""Adaptive pop-quiz synthesis for block-based programming tasks."""

from .code_dsl import (
    Action,
    Blank,
    CodeMetrics,
    CodeSyntaxError,
    DslError,
    GrammarError,
    If,
    IfElse,
    Program,
    Repeat,
    RepeatUntil,
    While,
    code_distance,
    metrics,
    parse,
    serialize,
)
from .emulator import (
    ExecutionResult,
    Pose,
    SizeViolation,
    StoreViolation,
    TaskError,
    TaskSpec,
    check_solves,
    parse_task,
    run,
    serialize_task,
)
from .mutation import MutationParams, NoCandidates, mutate
from .pipeline import (
    AmbiguousQuiz,
    DegenerateQuiz,
    NoLeaf,
    PipelineFailure,
    PipelineParams,
    Provenance,
    Quiz,
    assemble_quiz,
    blank_last_leaf,
    choose_seed,
    generate_popquiz,
    get_sketch,
    quiz_from_text,
    quiz_to_text,
)
from .reduction import InvalidTarget, red_codes
from .sketch import (
    Sketch,
    abstract,
    parse_sketch,
    serialize_sketch,
    sketch_distance,
    substructures,
)
from .task_synth import (
    SynthParams,
    SynthesisFailure,
    grid_dissimilarity,
    quality_score,
    select_diverse,
    synthesize_tasks,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AmbiguousQuiz",
    "Blank",
    "CodeMetrics",
    "CodeSyntaxError",
    "DegenerateQuiz",
    "DslError",
    "ExecutionResult",
    "GrammarError",
    "If",
    "IfElse",
    "InvalidTarget",
    "MutationParams",
    "NoCandidates",
    "NoLeaf",
    "PipelineFailure",
    "PipelineParams",
    "Pose",
    "Program",
    "Provenance",
    "Quiz",
    "Repeat",
    "RepeatUntil",
    "SizeViolation",
    "Sketch",
    "StoreViolation",
    "SynthParams",
    "SynthesisFailure",
    "TaskError",
    "TaskSpec",
    "While",
    "abstract",
    "assemble_quiz",
    "blank_last_leaf",
    "check_solves",
    "choose_seed",
    "code_distance",
    "generate_popquiz",
    "get_sketch",
    "grid_dissimilarity",
    "metrics",
    "mutate",
    "parse",
    "parse_sketch",
    "parse_task",
    "quality_score",
    "quiz_from_text",
    "quiz_to_text",
    "red_codes",
    "run",
    "select_diverse",
    "serialize",
    "serialize_sketch",
    "serialize_task",
    "sketch_distance",
    "substructures",
    "synthesize_tasks",
]
