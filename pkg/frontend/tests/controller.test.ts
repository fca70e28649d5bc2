import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/controller.js";

type Responder = (url: string, init?: RequestInit) => { status: number; body: unknown } | Promise<{ status: number; body: unknown }>;

function fakeFetch(responder: Responder) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    const { status, body } = await responder(url, init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
}

const TASK_DETAIL = {
  id: "t",
  kind: "hoc",
  size: 2,
  maxblocks: 5,
  rows: ["..", ".+"],
  agent: { row: 0, col: 0, dir: "E" },
  store: ["move", "turnLeft", "turnRight"],
  task: "kind:hoc\nsize:2\n..\n.+\nagent:0,0,E\nstore:move\nmaxblocks:5\n",
};

function snapshot(extra: Record<string, unknown> = {}) {
  return {
    id: "s1",
    taskId: "t",
    step: "A",
    triesLeft: 10,
    feedbackMethod: null,
    feedbackIssued: false,
    quiz: null,
    quizAnswered: false,
    quizCorrect: null,
    outcome: null,
    ...extra,
  };
}

describe("SessionController", () => {
  it("mirrors server-reported step and tries", async () => {
    let runs = 0;
    const api = new ApiClient(
      "",
      fakeFetch((url) => {
        if (url === "/api/tasks/t") return { status: 200, body: TASK_DETAIL };
        if (url === "/api/sessions") return { status: 200, body: snapshot() };
        if (url.endsWith("/run")) {
          runs += 1;
          return {
            status: 200,
            body: {
              result: { status: "incomplete", stepsUsed: 1, blockCoverage: 1, trace: [] },
              triesLeft: 10 - runs,
              step: runs >= 10 ? "B" : "A",
              outcome: null,
            },
          };
        }
        throw new Error(`unexpected ${url}`);
      }),
    );
    const controller = new SessionController(api, "t");
    await controller.start();
    expect(controller.state().step).toBe("A");
    for (let i = 0; i < 10; i++) await controller.run("Run{turnLeft}");
    expect(controller.state().step).toBe("B");
    expect(controller.state().triesLeft).toBe(0);
  });

  it("shows the quiz dialog exactly once", async () => {
    const quiz = {
      task: TASK_DETAIL.task,
      rows: TASK_DETAIL.rows,
      code: "Run{__blank__}",
      choices: ["move", "turnLeft", "turnRight"],
    };
    let feedbackCalls = 0;
    const api = new ApiClient(
      "",
      fakeFetch((url) => {
        if (url === "/api/tasks/t") return { status: 200, body: TASK_DETAIL };
        if (url === "/api/sessions") return { status: 200, body: snapshot({ step: "B" }) };
        if (url.endsWith("/feedback")) {
          feedbackCalls += 1;
          if (feedbackCalls > 1) return { status: 409, body: { error: "already issued" } };
          return { status: 200, body: { method: "PQuizSyn", quiz } };
        }
        if (url.endsWith("/quiz/answer")) {
          return { status: 200, body: { correct: true, step: "C" } };
        }
        throw new Error(`unexpected ${url}`);
      }),
    );
    const controller = new SessionController(api, "t");
    await controller.start();
    const first = await controller.requestFeedback();
    expect(first?.method).toBe("PQuizSyn");
    expect(controller.state().quizDialogOpens).toBe(1);
    // the controller refuses locally, before any network call
    const second = await controller.requestFeedback();
    expect(second).toBeNull();
    expect(feedbackCalls).toBe(1);
    expect(controller.state().quizDialogOpens).toBe(1);

    const correct = await controller.answerQuiz(0);
    expect(correct).toBe(true);
    expect(controller.state().step).toBe("C");
    // a second answer is refused locally too
    expect(await controller.answerQuiz(1)).toBeNull();
  });

  it("discards stale out-of-order replies", async () => {
    const gates: Array<() => void> = [];
    let runs = 0;
    const api = new ApiClient(
      "",
      fakeFetch(async (url) => {
        if (url === "/api/tasks/t") return { status: 200, body: TASK_DETAIL };
        if (url === "/api/sessions") return { status: 200, body: snapshot() };
        if (url.endsWith("/run")) {
          runs += 1;
          const mine = runs;
          await new Promise<void>((resolve) => gates.push(resolve));
          return {
            status: 200,
            body: {
              result: { status: "incomplete", stepsUsed: mine, blockCoverage: 1, trace: [] },
              triesLeft: 10 - mine,
              step: "A",
              outcome: null,
            },
          };
        }
        throw new Error(`unexpected ${url}`);
      }),
    );
    const controller = new SessionController(api, "t");
    await controller.start();
    const firstCall = controller.run("Run{move}");
    const secondCall = controller.run("Run{turnLeft}");
    // resolve in reverse order: the newer reply lands first
    gates[1]();
    await secondCall;
    expect(controller.state().triesLeft).toBe(8);
    gates[0]();
    await firstCall;
    // the stale first reply must not roll triesLeft back to 9
    expect(controller.state().triesLeft).toBe(8);
  });

  it("rehydrates identical state from a session id", async () => {
    const stored = snapshot({ step: "C", triesLeft: 4, feedbackIssued: true, feedbackMethod: "NoHint" });
    const api = new ApiClient(
      "",
      fakeFetch((url) => {
        if (url === "/api/tasks/t") return { status: 200, body: TASK_DETAIL };
        if (url === "/api/sessions/s1") return { status: 200, body: stored };
        throw new Error(`unexpected ${url}`);
      }),
    );
    const controller = new SessionController(api, "t");
    const view = await controller.start("s1");
    expect(view.step).toBe("C");
    expect(view.triesLeft).toBe(4);
    expect(view.feedbackSeen).toBe(true);
  });

  it("surfaces validation errors without consuming state", async () => {
    const api = new ApiClient(
      "",
      fakeFetch((url) => {
        if (url === "/api/tasks/t") return { status: 200, body: TASK_DETAIL };
        if (url === "/api/sessions") return { status: 200, body: snapshot() };
        if (url.endsWith("/run")) {
          return { status: 400, body: { error: "unknown statement 'zig'", position: 4 } };
        }
        throw new Error(`unexpected ${url}`);
      }),
    );
    const controller = new SessionController(api, "t");
    await controller.start();
    const result = await controller.run("Run{zig}");
    expect(result).toBeNull();
    expect(controller.state().error).toMatch(/zig/);
    expect(controller.state().triesLeft).toBe(10);
    expect(controller.state().step).toBe("A");
  });
});
