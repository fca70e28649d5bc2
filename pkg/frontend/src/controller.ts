/** Session flow controller: the state machine behind the page.
 *
 * The server is the source of truth for the step, the tries and the
 * quiz; the controller only mirrors what replies report. Responses that
 * arrive after a newer request has been issued are discarded by sequence
 * number, so an out-of-order network cannot roll the view backwards.
 */

import { ApiClient, ApiFailure } from "./api.js";
import type {
  FeedbackReply,
  QuizPayload,
  RunResult,
  SessionSnapshot,
  TaskDetail,
} from "./types.js";

export interface ViewState {
  sessionId: string | null;
  taskId: string;
  step: "A" | "B" | "C" | "done" | null;
  triesLeft: number;
  outcome: string | null;
  task: TaskDetail | null;
  feedbackMethod: string | null;
  feedbackSeen: boolean;
  hintCode: string | null;
  quiz: QuizPayload | null;
  quizAnswered: boolean;
  quizCorrect: boolean | null;
  quizDialogOpens: number;
  lastRun: RunResult | null;
  error: string | null;
}

function freshView(taskId: string): ViewState {
  return {
    sessionId: null,
    taskId,
    step: null,
    triesLeft: 0,
    outcome: null,
    task: null,
    feedbackMethod: null,
    feedbackSeen: false,
    hintCode: null,
    quiz: null,
    quizAnswered: false,
    quizCorrect: null,
    quizDialogOpens: 0,
    lastRun: null,
    error: null,
  };
}

export class SessionController {
  private view: ViewState;
  private issued = 0;
  private applied = 0;
  private listeners: Array<(view: ViewState) => void> = [];

  constructor(
    private readonly api: ApiClient,
    taskId: string,
  ) {
    this.view = freshView(taskId);
  }

  state(): ViewState {
    return { ...this.view };
  }

  onChange(listener: (view: ViewState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state());
  }

  /** Stamp an outgoing mutation; returns an applier that drops stale replies. */
  private stamp(): (apply: () => void) => boolean {
    const ticket = ++this.issued;
    return (apply) => {
      if (ticket <= this.applied) return false; // a newer reply already landed
      this.applied = ticket;
      apply();
      this.emit();
      return true;
    };
  }

  /** Create a fresh session, or rehydrate an existing one from the server. */
  async start(sessionId?: string): Promise<ViewState> {
    this.view.task = await this.api.getTask(this.view.taskId);
    const snapshot = sessionId
      ? await this.api.getSession(sessionId)
      : await this.api.createSession(this.view.taskId);
    this.adopt(snapshot);
    this.emit();
    return this.state();
  }

  private adopt(snapshot: SessionSnapshot): void {
    this.view.sessionId = snapshot.id;
    this.view.taskId = snapshot.taskId;
    this.view.step = snapshot.step;
    this.view.triesLeft = snapshot.triesLeft;
    this.view.outcome = snapshot.outcome;
    this.view.feedbackMethod = snapshot.feedbackMethod;
    this.view.feedbackSeen = snapshot.feedbackIssued;
    this.view.quiz = snapshot.quiz;
    this.view.quizAnswered = snapshot.quizAnswered;
    this.view.quizCorrect = snapshot.quizCorrect;
  }

  async run(code: string): Promise<RunResult | null> {
    if (!this.view.sessionId) throw new Error("no session");
    const commit = this.stamp();
    try {
      const reply = await this.api.submitRun(this.view.sessionId, code);
      commit(() => {
        this.view.lastRun = reply.result;
        this.view.step = reply.step as ViewState["step"];
        this.view.triesLeft = reply.triesLeft;
        this.view.outcome = reply.outcome;
        this.view.error = null;
      });
      return reply.result;
    } catch (err) {
      if (err instanceof ApiFailure) {
        commit(() => {
          this.view.error = err.payload.error;
        });
        return null;
      }
      throw err;
    }
  }

  /**
   * Fetch the one-time feedback payload. The dialog-open counter exists
   * so the page (and the tests) can assert the dialog shows exactly once.
   */
  async requestFeedback(): Promise<FeedbackReply | null> {
    if (!this.view.sessionId) throw new Error("no session");
    if (this.view.feedbackSeen) {
      this.view.error = "feedback was already shown";
      this.emit();
      return null;
    }
    const commit = this.stamp();
    try {
      const reply = await this.api.requestFeedback(this.view.sessionId);
      commit(() => {
        this.view.feedbackSeen = true;
        this.view.feedbackMethod = reply.method;
        this.view.error = null;
        if (reply.method === "PQuizSyn" && reply.quiz) {
          this.view.quiz = reply.quiz;
          this.view.quizDialogOpens += 1;
          this.view.step = "B";
        } else {
          this.view.hintCode = reply.code ?? null;
          this.view.step = (reply.step as ViewState["step"]) ?? "C";
          this.view.triesLeft = reply.triesLeft ?? this.view.triesLeft;
        }
      });
      return reply;
    } catch (err) {
      if (err instanceof ApiFailure) {
        commit(() => {
          this.view.error = err.payload.error;
        });
        return null;
      }
      throw err;
    }
  }

  async answerQuiz(choice: number): Promise<boolean | null> {
    if (!this.view.sessionId) throw new Error("no session");
    if (this.view.quizAnswered) {
      this.view.error = "the quiz was already answered";
      this.emit();
      return null;
    }
    const commit = this.stamp();
    try {
      const reply = await this.api.answerQuiz(this.view.sessionId, choice);
      commit(() => {
        this.view.quizAnswered = true;
        this.view.quizCorrect = reply.correct;
        this.view.step = reply.step as ViewState["step"];
        this.view.triesLeft = 10;
        this.view.error = null;
      });
      return reply.correct;
    } catch (err) {
      if (err instanceof ApiFailure) {
        commit(() => {
          this.view.error = err.payload.error;
        });
        return null;
      }
      throw err;
    }
  }

  /** Re-fetch the authoritative state (used after focus/refresh). */
  async resync(): Promise<ViewState> {
    if (!this.view.sessionId) throw new Error("no session");
    const snapshot = await this.api.getSession(this.view.sessionId);
    this.adopt(snapshot);
    this.emit();
    return this.state();
  }
}
