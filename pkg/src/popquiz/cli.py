"""Command-line front end: synthesize, enumerate, run, serve.

Exit codes: 0 success; 1 malformed input files; 2 pipeline found no
quiz; 3 executed code did not succeed; 64 bad usage.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from pathlib import Path

from .code_dsl import DslError, code_distance, parse, serialize
from .emulator import (
    SizeViolation,
    StoreViolation,
    TaskError,
    parse_task,
    run,
    serialize_task,
)
from .mutation import MutationParams, NoCandidates, mutate
from .pipeline import (
    PipelineFailure,
    PipelineParams,
    generate_popquiz,
    quiz_to_text,
)
from .reduction import red_codes
from .sketch import abstract, serialize_sketch, substructures
from .task_synth import SynthParams, SynthesisFailure, synthesize_tasks

EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="popquiz", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate quiz documents for one attempt")
    synth.add_argument("--task", required=True, help="task file")
    synth.add_argument("--solution", required=True, help="solution code file")
    synth.add_argument("--attempt", required=True, help="student attempt code file")
    synth.add_argument(
        "--variant",
        default="pquizsyn",
        choices=["pquizsyn", "fullhop", "onehop", "redcode"],
    )
    synth.add_argument("--count", type=int, default=5, help="max quizzes to emit")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--theta", type=int, default=2, help="min distance from the solution")
    synth.add_argument("--check-minimality", action="store_true")

    enum = sub.add_parser("enumerate", help="count quizzes per sketch substructure")
    enum.add_argument("--task", required=True)
    enum.add_argument("--solution", required=True)
    enum.add_argument("--per-substructure", type=int, default=0,
                      help="stop a row after this many unique pairs (0: no cap)")
    enum.add_argument("--budget", type=float, default=300.0,
                      help="seconds of work per substructure")
    enum.add_argument("--seed", type=int, default=0)
    enum.add_argument("--theta", type=int, default=2)

    runner = sub.add_parser("run", help="execute a code on a task and print the result")
    runner.add_argument("--task", required=True)
    runner.add_argument("--code", required=True)
    runner.add_argument("--seed", type=int, default=0)

    serve = sub.add_parser("serve", help="start the practice service")
    serve.add_argument("--tasks-dir", default="data/tasks")
    serve.add_argument("--data-dir", default="data/sessions")
    serve.add_argument("--seed", type=int, default=None)

    return parser


def _read(path: str, what: str):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {what} {path}: {exc}", file=sys.stderr)
        raise SystemExit(1)


def _load_task(path: str):
    try:
        return parse_task(_read(path, "task"))
    except TaskError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        raise SystemExit(1)


def _load_code(path: str):
    try:
        return parse(_read(path, "code").strip())
    except DslError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        raise SystemExit(1)


def cmd_synth(args) -> int:
    task = _load_task(args.task)
    solution = _load_code(args.solution)
    attempt = _load_code(args.attempt)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = PipelineParams(
        mutation=MutationParams(theta_conceal=args.theta),
        synth=SynthParams(check_minimality=args.check_minimality),
        max_quizzes=args.count,
        rng_seed=args.seed,
    )
    try:
        quizzes = generate_popquiz(task, solution, attempt, args.variant, params)
    except PipelineFailure as exc:
        print(f"pipeline failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return 2
    for i, quiz in enumerate(quizzes):
        path = out_dir / f"quiz{i:02d}.quiz"
        path.write_text(quiz_to_text(quiz), encoding="utf-8")
        print(
            f"{path.name}\tsketch={serialize_sketch(quiz.provenance.sketch)}"
            f"\tlhat={quiz.provenance.lhat}"
            f"\tdc={code_distance(quiz.provenance.full_code, solution)}"
            f"\tquality={quiz.quality:.3f}"
        )
    return 0


def cmd_enumerate(args) -> int:
    task = _load_task(args.task)
    solution = _load_code(args.solution)
    sol_sketch = abstract(solution)
    rng = random.Random(args.seed)
    rows = []
    for sub_sketch in substructures(sol_sketch):
        deadline = time.monotonic() + args.budget
        codes: set[str] = set()
        pairs: set[tuple[str, str]] = set()
        target = args.per_substructure or None
        if args.budget > 0:
            seeds = sorted(red_codes(solution, sub_sketch), key=serialize)
            if not seeds and sub_sketch == sol_sketch:
                seeds = [solution]
            candidates = []
            for seed_code in seeds:
                try:
                    candidates.extend(
                        mutate(
                            seed_code,
                            sub_sketch,
                            solution,
                            MutationParams(
                                theta_conceal=args.theta,
                                max_candidates=512,
                                rng_seed=rng.randrange(2**62),
                            ),
                            store=task.store,
                        )
                    )
                except NoCandidates:
                    continue
            seen_code: set[str] = set()
            for code in candidates:
                if time.monotonic() > deadline:
                    break
                if target and len(pairs) >= target:
                    break
                code_text = serialize(code)
                if code_text in seen_code:
                    continue
                seen_code.add(code_text)
                try:
                    tasks = synthesize_tasks(
                        code,
                        SynthParams(kind=task.kind, rng_seed=rng.randrange(2**62)),
                    )
                except SynthesisFailure:
                    continue
                if tasks:
                    codes.add(code_text)
                    for t, _ in tasks:
                        pairs.add((serialize_task(t), code_text))
        rows.append((serialize_sketch(sub_sketch), len(codes), len(pairs)))
    print("substructure\tcodes\tpairs")
    for sketch_text, n_codes, n_pairs in rows:
        print(f"{sketch_text}\t{n_codes}\t{n_pairs}")
    return 0


def cmd_run(args) -> int:
    task = _load_task(args.task)
    code = _load_code(args.code)
    try:
        result = run(code, task)
    except (StoreViolation, SizeViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"status: {result.status}")
    print(f"steps: {result.steps_used}")
    print(f"coverage: {result.block_coverage:.2f}")
    for pose, action in result.trace:
        print(f"  ({pose.row},{pose.col},{pose.direction}) {action}")
    return 0 if result.status == "success" else 3


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = int(os.environ.get("POPQUIZ_PORT", "8000"))
    app = create_app(args.tasks_dir, args.data_dir, args.seed)
    uvicorn.run(app, host="127.0.0.1", port=port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "synth": cmd_synth,
        "enumerate": cmd_enumerate,
        "run": cmd_run,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
