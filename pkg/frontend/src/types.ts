/** Wire payload shapes of the practice service API. */

export interface TaskSummary {
  id: string;
  kind: "hoc" | "karel";
  size: number;
  maxblocks: number;
}

export interface AgentPose {
  row: number;
  col: number;
  dir: "N" | "E" | "S" | "W";
}

export interface TaskDetail extends TaskSummary {
  rows: string[];
  agent: AgentPose;
  store: string[];
  task: string;
}

export interface TraceStep {
  row: number;
  col: number;
  dir: string;
  action: string;
}

export interface RunResult {
  status: "success" | "crash" | "timeout" | "incomplete";
  stepsUsed: number;
  blockCoverage: number;
  trace: TraceStep[];
}

export interface RunReply {
  result: RunResult;
  triesLeft: number;
  step: string;
  outcome: string | null;
}

export interface QuizPayload {
  task: string;
  rows: string[];
  code: string;
  choices: string[];
}

export interface FeedbackReply {
  method: "NoHint" | "NextStep" | "PQuizSyn";
  step?: string;
  triesLeft?: number;
  code?: string;
  quiz?: QuizPayload;
}

export interface AnswerReply {
  correct: boolean;
  step: string;
}

export interface SessionSnapshot {
  id: string;
  taskId: string;
  step: "A" | "B" | "C" | "done";
  triesLeft: number;
  feedbackMethod: string | null;
  feedbackIssued: boolean;
  quiz: QuizPayload | null;
  quizAnswered: boolean;
  quizCorrect: boolean | null;
  outcome: string | null;
}

export interface ApiError {
  error: string;
  position?: number | null;
}
