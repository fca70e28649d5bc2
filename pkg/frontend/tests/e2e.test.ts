/**
 * End-to-end flow against a live service: the scripted client walks the
 * exact transitions the page performs. Step A is failed on purpose, the
 * pop-quiz dialog must appear exactly once, a refreshed controller must
 * rehydrate identical state, and step C is solved.
 *
 * The sandbox ships no browser binaries, so the test drives the
 * controller layer (the same state machine main.ts wires to the DOM)
 * over real HTTP.
 */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/controller.js";
import { fromQuizPayload } from "../src/grid.js";

const PORT = 8710 + (process.pid % 50);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = join(__dirname, "..", "..");

const SOLUTION =
  "Run{RepeatUntil(goal){IfElse(pathAhead){move}{IfElse(pathLeft){turnLeft}{turnRight}}}}";
const FAILING = "Run{move;move;turnLeft}";

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const reply = await fetch(`${BASE}/api/tasks`);
      if (reply.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "popquiz-e2e-"));
  server = spawn(
    "python3",
    [
      "-m",
      "popquiz.cli",
      "serve",
      "--tasks-dir",
      join(REPO_ROOT, "data", "tasks"),
      "--data-dir",
      dataDir,
      "--seed",
      "77",
    ],
    {
      cwd: REPO_ROOT,
      env: { ...process.env, POPQUIZ_PORT: String(PORT) },
      stdio: "ignore",
    },
  );
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("browser flow against the live service", () => {
  it("lists the bundled tasks", async () => {
    const api = new ApiClient(BASE);
    const tasks = await api.listTasks();
    expect(tasks.map((t) => t.id).sort()).toEqual(["hoc-maze", "karel-line"]);
  });

  it(
    "completes A-fail -> quiz -> C-solve with a single quiz dialog",
    { timeout: 120_000 },
    async () => {
      const api = new ApiClient(BASE);

      // feedback methods are assigned at random; open sessions until the
      // pop quiz method comes up
      let controller: SessionController | null = null;
      for (let attempt = 0; attempt < 40 && !controller; attempt++) {
        const candidate = new SessionController(api, "hoc-maze");
        await candidate.start();
        for (let i = 0; i < 10; i++) await candidate.run(FAILING);
        expect(candidate.state().step).toBe("B");
        const feedback = await candidate.requestFeedback();
        expect(feedback).not.toBeNull();
        if (feedback!.method === "PQuizSyn") {
          controller = candidate;
        }
      }
      expect(controller).not.toBeNull();
      const view = controller!.state();

      // the quiz dialog opened exactly once and carries a renderable task
      expect(view.quizDialogOpens).toBe(1);
      expect(view.quiz).not.toBeNull();
      const grid = fromQuizPayload(view.quiz!);
      expect(grid.size).toBeGreaterThanOrEqual(2);
      expect(view.quiz!.code).toContain("__blank__");
      expect([3, 5]).toContain(view.quiz!.choices.length);

      // a second request must not open another dialog
      const again = await controller!.requestFeedback();
      expect(again).toBeNull();
      expect(controller!.state().quizDialogOpens).toBe(1);

      // refresh: a brand-new controller rehydrated from the session id
      // sees the same server state
      const rehydrated = new SessionController(api, "hoc-maze");
      await rehydrated.start(view.sessionId!);
      const a = controller!.state();
      const b = rehydrated.state();
      expect(b.step).toBe(a.step);
      expect(b.triesLeft).toBe(a.triesLeft);
      expect(b.feedbackSeen).toBe(true);
      expect(b.quiz).toEqual(a.quiz);

      // answer the quiz (any choice advances to step C)
      const correct = await controller!.answerQuiz(0);
      expect(typeof correct).toBe("boolean");
      expect(controller!.state().step).toBe("C");
      expect(controller!.state().triesLeft).toBe(10);

      // the answered dialog refuses further answers
      expect(await controller!.answerQuiz(1)).toBeNull();

      // solve the original task in step C
      const result = await controller!.run(SOLUTION);
      expect(result?.status).toBe("success");
      expect(controller!.state().step).toBe("done");
      expect(controller!.state().outcome).toBe("solved_c");

      // the refreshed controller converges to the same terminal state
      await rehydrated.resync();
      expect(rehydrated.state().step).toBe("done");
      expect(rehydrated.state().outcome).toBe("solved_c");
    },
  );
});
