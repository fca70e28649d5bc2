/** Thin typed client over the practice service wire API. */

import type {
  AnswerReply,
  ApiError,
  FeedbackReply,
  RunReply,
  SessionSnapshot,
  TaskDetail,
  TaskSummary,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiFailure extends Error {
  constructor(
    public readonly status: number,
    public readonly payload: ApiError,
  ) {
    super(payload.error ?? `request failed with ${status}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiFailure(response.status, body as ApiError);
    }
    return body as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? "{}" : JSON.stringify(body),
    });
  }

  listTasks(): Promise<TaskSummary[]> {
    return this.request<TaskSummary[]>("/api/tasks");
  }

  getTask(taskId: string): Promise<TaskDetail> {
    return this.request<TaskDetail>(`/api/tasks/${taskId}`);
  }

  createSession(taskId: string): Promise<SessionSnapshot> {
    return this.post<SessionSnapshot>("/api/sessions", { taskId });
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>(`/api/sessions/${sessionId}`);
  }

  submitRun(sessionId: string, code: string): Promise<RunReply> {
    return this.post<RunReply>(`/api/sessions/${sessionId}/run`, { code });
  }

  requestFeedback(sessionId: string): Promise<FeedbackReply> {
    return this.post<FeedbackReply>(`/api/sessions/${sessionId}/feedback`);
  }

  answerQuiz(sessionId: string, choice: number): Promise<AnswerReply> {
    return this.post<AnswerReply>(`/api/sessions/${sessionId}/quiz/answer`, { choice });
  }
}
