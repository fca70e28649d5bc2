"""Drive a complete practice session against the in-process service.

A session has three steps: ten tries on the task, one round of feedback,
ten more tries. This script fails step A on purpose, takes whatever
feedback the coin toss assigns, then solves in step C.

Run with: python3 demos/04_practice_session.py
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from popquiz.service import create_app

DATA = Path(__file__).parent.parent / "data" / "tasks"

with tempfile.TemporaryDirectory() as logs:
    app = create_app(DATA, logs, rng_seed=17)
    client = TestClient(app)

    session = client.post("/api/sessions", json={"taskId": "hoc-maze"}).json()
    sid = session["id"]
    print("step", session["step"], "with", session["triesLeft"], "tries")

    for attempt in range(10):
        reply = client.post(f"/api/sessions/{sid}/run",
                            json={"code": "Run{move;move;turnLeft}"}).json()
    print("after 10 failed tries -> step", reply["step"])

    feedback = client.post(f"/api/sessions/{sid}/feedback").json()
    print("assigned feedback:", feedback["method"])
    if feedback["method"] == "NextStep":
        print("  suggested code:", feedback["code"])
    elif feedback["method"] == "PQuizSyn":
        quiz = feedback["quiz"]
        print("  quiz grid:")
        for row in quiz["rows"]:
            print("   ", row)
        print("  blanked code:", quiz["code"])
        print("  choices:", quiz["choices"])
        answer = client.post(f"/api/sessions/{sid}/quiz/answer", json={"choice": 0}).json()
        print("  answered first choice ->", "correct" if answer["correct"] else "wrong")

    solution = (DATA / "hoc-maze.solution").read_text().strip()
    reply = client.post(f"/api/sessions/{sid}/run", json={"code": solution}).json()
    print("step C run:", reply["result"]["status"], "->", reply["outcome"])

    log = Path(logs) / f"{sid}.jsonl"
    print("event log records:", len(log.read_text().splitlines()))
