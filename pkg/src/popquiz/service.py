"""Practice platform back end: sessions, tries, one-time feedback.

A session walks three steps. Step A gives ten execution tries on the
task; failing all of them moves the session to step B, where exactly one
feedback payload is issued (no hint, a next-step edit, or a pop quiz).
Step C gives ten more tries; solving or exhausting them ends the
session.

Every mutation appends one JSON record to the session's event log, and
replaying the log reproduces the session state bit for bit.
"""

from __future__ import annotations

import json
import random
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .code_dsl import DslError, Program, parse, serialize
from .emulator import (
    ExecutionResult,
    SizeViolation,
    StoreViolation,
    TaskSpec,
    parse_task,
    run,
    serialize_task,
)
from .mutation import MutationParams
from .nextstep import next_step_edit
from .pipeline import (
    PipelineFailure,
    PipelineParams,
    Quiz,
    generate_popquiz,
    quiz_from_text,
    quiz_to_text,
)
from .sketch import abstract, serialize_sketch
from .task_synth import SynthParams

TRIES_PER_STEP = 10
FEEDBACK_METHODS = ("NoHint", "NextStep", "PQuizSyn")


class ServiceError(Exception):
    status = 400


class UnknownTask(ServiceError):
    status = 404


class UnknownSession(ServiceError):
    status = 404


class BadStep(ServiceError):
    status = 409


class AlreadyIssued(ServiceError):
    status = 409


class OutOfTries(ServiceError):
    status = 409


class NoQuiz(ServiceError):
    status = 409


class IndexOutOfRange(ServiceError):
    status = 400


@dataclass
class SessionState:
    id: str
    task_id: str
    step: str = "A"  # A | B | C | done
    tries_left: int = TRIES_PER_STEP
    feedback_method: Optional[str] = None
    feedback_issued: bool = False
    quiz_text: Optional[str] = None
    quiz_answered: bool = False
    quiz_correct: Optional[bool] = None
    last_attempt: Optional[str] = None
    outcome: Optional[str] = None  # solved_a | solved_c | failed_c

    def snapshot(self, reveal_quiz: bool = False) -> dict:
        quiz_payload = None
        if self.quiz_text is not None:
            quiz = quiz_from_text(self.quiz_text)
            quiz_payload = quiz_public_payload(quiz)
            if reveal_quiz:
                quiz_payload["correct"] = quiz.correct_index
        return {
            "id": self.id,
            "taskId": self.task_id,
            "step": self.step,
            "triesLeft": self.tries_left,
            "feedbackMethod": self.feedback_method,
            "feedbackIssued": self.feedback_issued,
            "quiz": quiz_payload,
            "quizAnswered": self.quiz_answered,
            "quizCorrect": self.quiz_correct,
            "outcome": self.outcome,
        }


def quiz_public_payload(quiz: Quiz) -> dict:
    """What a client may see: the task, the blanked code and the choices."""
    task_text = serialize_task(quiz.task)
    return {
        "task": task_text,
        "rows": task_text.splitlines()[2: 2 + quiz.task.size],
        "code": serialize(quiz.blanked_code),
        "choices": list(quiz.choices),
    }


@dataclass(frozen=True)
class TaskEntry:
    id: str
    task: TaskSpec
    solution: Program


def load_catalog(tasks_dir: Path) -> dict[str, TaskEntry]:
    catalog: dict[str, TaskEntry] = {}
    for task_path in sorted(Path(tasks_dir).glob("*.task")):
        solution_path = task_path.with_suffix(".solution")
        if not solution_path.exists():
            continue
        task = parse_task(task_path.read_text(encoding="utf-8"))
        solution = parse(solution_path.read_text(encoding="utf-8").strip())
        catalog[task_path.stem] = TaskEntry(task_path.stem, task, solution)
    return catalog


def _result_payload(result: ExecutionResult) -> dict:
    return {
        "status": result.status,
        "stepsUsed": result.steps_used,
        "blockCoverage": round(result.block_coverage, 4),
        "trace": [
            {"row": pose.row, "col": pose.col, "dir": pose.direction, "action": action}
            for pose, action in result.trace
        ],
    }


class PracticeService:
    """In-memory session store with an append-only event log per session."""

    def __init__(self, catalog: dict[str, TaskEntry], data_dir: Path, rng_seed: int | None = None):
        self.catalog = catalog
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.rng = random.Random(rng_seed)
        self.sessions: dict[str, SessionState] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.quiz_cache: dict[tuple[str, str], list[str]] = {}
        self.registry_lock = threading.Lock()

    # -- infrastructure ------------------------------------------------

    def _log(self, session_id: str, record: dict) -> None:
        path = self.data_dir / f"{session_id}.jsonl"
        line = json.dumps(record, sort_keys=True)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def _session(self, session_id: str) -> tuple[SessionState, threading.Lock]:
        with self.registry_lock:
            if session_id not in self.sessions:
                raise UnknownSession(f"unknown session {session_id!r}")
            return self.sessions[session_id], self.locks[session_id]

    # -- operations ------------------------------------------------------

    def create_session(self, task_id: str) -> SessionState:
        if task_id not in self.catalog:
            raise UnknownTask(f"unknown task {task_id!r}")
        session_id = uuid.uuid4().hex
        state = SessionState(id=session_id, task_id=task_id)
        with self.registry_lock:
            self.sessions[session_id] = state
            self.locks[session_id] = threading.Lock()
        self._log(session_id, {"event": "created", "id": session_id, "taskId": task_id})
        return state

    def get_session(self, session_id: str) -> SessionState:
        state, _ = self._session(session_id)
        return state

    def submit_run(self, session_id: str, code_text: str) -> dict:
        state, lock = self._session(session_id)
        with lock:
            if state.step not in ("A", "C"):
                raise BadStep(f"cannot run in step {state.step}")
            if state.tries_left <= 0:
                raise OutOfTries("no tries left")
            code = parse(code_text)  # DslError propagates; no try consumed
            entry = self.catalog[state.task_id]
            try:
                result = run(code, entry.task)
            except (StoreViolation, SizeViolation) as exc:
                raise ServiceError(str(exc))  # 400, no try consumed
            state.tries_left -= 1
            state.last_attempt = serialize(code)
            if result.status == "success":
                state.outcome = "solved_a" if state.step == "A" else "solved_c"
                state.step = "done"
            elif state.tries_left == 0:
                if state.step == "A":
                    state.step = "B"
                    state.feedback_method = self.rng.choice(FEEDBACK_METHODS)
                else:
                    state.outcome = "failed_c"
                    state.step = "done"
            self._log(
                session_id,
                {
                    "event": "run",
                    "code": state.last_attempt,
                    "status": result.status,
                    "triesLeft": state.tries_left,
                    "step": state.step,
                    "outcome": state.outcome,
                    "feedbackMethod": state.feedback_method,
                },
            )
            return {
                "result": _result_payload(result),
                "triesLeft": state.tries_left,
                "step": state.step,
                "outcome": state.outcome,
            }

    def _quiz_for(self, entry: TaskEntry, attempt: Program) -> Quiz:
        sketch_key = serialize_sketch(abstract(attempt))
        cache_key = (entry.id, sketch_key)
        if cache_key not in self.quiz_cache:
            params = PipelineParams(
                mutation=MutationParams(rng_seed=self.rng.randrange(2**62)),
                synth=SynthParams(
                    tasks_per_code=3,
                    beam_width=120,
                    max_start_attempts=8,
                    rng_seed=self.rng.randrange(2**62),
                ),
                max_quizzes=3,
                rng_seed=self.rng.randrange(2**62),
            )
            try:
                quizzes = generate_popquiz(entry.task, entry.solution, attempt, "pquizsyn", params)
            except PipelineFailure:
                quizzes = generate_popquiz(entry.task, entry.solution, attempt, "fullhop", params)
            self.quiz_cache[cache_key] = [quiz_to_text(q) for q in quizzes]
        return quiz_from_text(self.rng.choice(self.quiz_cache[cache_key]))

    def request_feedback(self, session_id: str) -> dict:
        state, lock = self._session(session_id)
        with lock:
            if state.step != "B":
                raise BadStep(f"feedback only available in step B, not {state.step}")
            if state.feedback_issued:
                raise AlreadyIssued("feedback was already issued")
            entry = self.catalog[state.task_id]
            method = state.feedback_method
            payload: dict = {"method": method}
            if method == "NoHint":
                state.step = "C"
                state.tries_left = TRIES_PER_STEP
            elif method == "NextStep":
                attempt = parse(state.last_attempt)
                hint = next_step_edit(attempt, entry.solution)
                payload["code"] = serialize(hint)
                state.step = "C"
                state.tries_left = TRIES_PER_STEP
            else:  # PQuizSyn
                attempt = parse(state.last_attempt)
                try:
                    quiz = self._quiz_for(entry, attempt)
                except PipelineFailure:
                    # no quiz producible for this attempt: degrade to the
                    # no-hint flow rather than stalling the session
                    payload["note"] = "no quiz available for this attempt"
                    state.step = "C"
                    state.tries_left = TRIES_PER_STEP
                else:
                    state.quiz_text = quiz_to_text(quiz)
                    payload["quiz"] = quiz_public_payload(quiz)
            state.feedback_issued = True
            self._log(
                session_id,
                {
                    "event": "feedback",
                    "method": method,
                    "step": state.step,
                    "triesLeft": state.tries_left,
                    "quizText": state.quiz_text,
                    "payloadCode": payload.get("code"),
                },
            )
            payload["step"] = state.step
            payload["triesLeft"] = state.tries_left
            return payload

    def answer_quiz(self, session_id: str, choice: int) -> dict:
        state, lock = self._session(session_id)
        with lock:
            if state.quiz_text is None:
                raise NoQuiz("no quiz was issued")
            if state.quiz_answered or state.step != "B":
                raise BadStep("quiz already answered")
            quiz = quiz_from_text(state.quiz_text)
            if not isinstance(choice, int) or not (0 <= choice < len(quiz.choices)):
                raise IndexOutOfRange(f"choice must lie in [0,{len(quiz.choices) - 1}]")
            state.quiz_answered = True
            state.quiz_correct = choice == quiz.correct_index
            state.step = "C"
            state.tries_left = TRIES_PER_STEP
            self._log(
                session_id,
                {
                    "event": "answer",
                    "choice": choice,
                    "correct": state.quiz_correct,
                    "step": state.step,
                    "triesLeft": state.tries_left,
                },
            )
            return {"correct": state.quiz_correct, "step": state.step}


def replay_session(log_lines: list[str]) -> SessionState:
    """Rebuild a session purely from its event log."""
    state: SessionState | None = None
    for line in log_lines:
        record = json.loads(line)
        event = record["event"]
        if event == "created":
            state = SessionState(id=record["id"], task_id=record["taskId"])
        elif event == "run":
            state.last_attempt = record["code"]
            state.tries_left = record["triesLeft"]
            state.step = record["step"]
            state.outcome = record["outcome"]
            state.feedback_method = record["feedbackMethod"]
        elif event == "feedback":
            state.feedback_issued = True
            state.step = record["step"]
            state.tries_left = record["triesLeft"]
            state.quiz_text = record["quizText"]
        elif event == "answer":
            state.quiz_answered = True
            state.quiz_correct = record["correct"]
            state.step = record["step"]
            state.tries_left = record["triesLeft"]
    if state is None:
        raise ValueError("empty event log")
    return state


def create_app(tasks_dir, data_dir, rng_seed: int | None = None) -> FastAPI:
    """FastAPI application wired to a fresh PracticeService."""
    catalog = load_catalog(Path(tasks_dir))
    service = PracticeService(catalog, Path(data_dir), rng_seed)
    app = FastAPI(title="popquiz practice service")
    app.state.service = service

    @app.exception_handler(ServiceError)
    async def service_error(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content={"error": str(exc)})

    @app.exception_handler(DslError)
    async def dsl_error(_request: Request, exc: DslError):
        return JSONResponse(
            status_code=400,
            content={"error": str(exc), "position": getattr(exc, "position", None)},
        )

    @app.get("/api/tasks")
    def list_tasks():
        return [
            {
                "id": entry.id,
                "kind": entry.task.kind,
                "size": entry.task.size,
                "maxblocks": entry.task.max_blocks,
            }
            for entry in catalog.values()
        ]

    @app.get("/api/tasks/{task_id}")
    def get_task(task_id: str):
        if task_id not in catalog:
            raise UnknownTask(f"unknown task {task_id!r}")
        entry = catalog[task_id]
        text = serialize_task(entry.task)
        return {
            "id": entry.id,
            "kind": entry.task.kind,
            "size": entry.task.size,
            "rows": text.splitlines()[2: 2 + entry.task.size],
            "agent": {
                "row": entry.task.start.row,
                "col": entry.task.start.col,
                "dir": entry.task.start.direction,
            },
            "store": sorted(entry.task.store),
            "maxblocks": entry.task.max_blocks,
            "task": text,
        }

    @app.post("/api/sessions")
    async def create_session(request: Request):
        body = await request.json()
        task_id = body.get("taskId")
        if not isinstance(task_id, str):
            return JSONResponse(status_code=400, content={"error": "taskId required"})
        return service.create_session(task_id).snapshot()

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return service.get_session(session_id).snapshot()

    @app.post("/api/sessions/{session_id}/run")
    async def submit_run(session_id: str, request: Request):
        body = await request.json()
        code = body.get("code")
        if not isinstance(code, str):
            return JSONResponse(status_code=400, content={"error": "code required"})
        return service.submit_run(session_id, code)

    @app.post("/api/sessions/{session_id}/feedback")
    def request_feedback(session_id: str):
        return service.request_feedback(session_id)

    @app.post("/api/sessions/{session_id}/quiz/answer")
    async def answer_quiz(session_id: str, request: Request):
        body = await request.json()
        choice = body.get("choice")
        if not isinstance(choice, int):
            return JSONResponse(status_code=400, content={"error": "choice must be an integer"})
        return service.answer_quiz(session_id, choice)

    return app
