/** Grid rendering model: task text -> cells, plus trace playback frames.
 *
 * The client never executes code; it only draws what the server reports.
 */

import type { AgentPose, QuizPayload, TaskDetail, TraceStep } from "./types.js";

export interface Cell {
  wall: boolean;
  goal: boolean;
  markers: number;
}

export interface GridModel {
  kind: "hoc" | "karel";
  size: number;
  cells: Cell[][];
  agent: AgentPose;
}

export function parseRows(rows: string[]): Cell[][] {
  return rows.map((row) =>
    [...row].map((ch) => ({
      wall: ch === "#",
      goal: ch === "+",
      markers: ch >= "1" && ch <= "9" ? Number(ch) : 0,
    })),
  );
}

/** Parse a full task document (the `task` field of a quiz payload). */
export function parseTaskText(text: string): GridModel {
  const lines = text.trimEnd().split("\n");
  const kind = lines[0].slice("kind:".length) as "hoc" | "karel";
  const size = Number(lines[1].slice("size:".length));
  const cells = parseRows(lines.slice(2, 2 + size));
  const agentLine = lines[2 + size];
  const [row, col, dir] = agentLine.slice("agent:".length).split(",");
  return {
    kind,
    size,
    cells,
    agent: { row: Number(row), col: Number(col), dir: dir as AgentPose["dir"] },
  };
}

export function fromTaskDetail(detail: TaskDetail): GridModel {
  return {
    kind: detail.kind,
    size: detail.size,
    cells: parseRows(detail.rows),
    agent: detail.agent,
  };
}

export function fromQuizPayload(quiz: QuizPayload): GridModel {
  return parseTaskText(quiz.task);
}

export const AGENT_GLYPHS: Record<string, string> = {
  N: "▲",
  E: "▶",
  S: "▼",
  W: "◀",
};

export interface Frame {
  agent: AgentPose;
  action: string | null;
  crashed: boolean;
}

/**
 * Playback frames for a run: the starting pose, then the pose before each
 * traced action. A crashing run flags its final frame so the renderer can
 * style the cell where the bad action was attempted.
 */
export function playbackFrames(
  start: AgentPose,
  trace: TraceStep[],
  status: string,
): Frame[] {
  const frames: Frame[] = [{ agent: start, action: null, crashed: false }];
  trace.forEach((step, i) => {
    frames.push({
      agent: { row: step.row, col: step.col, dir: step.dir as AgentPose["dir"] },
      action: step.action,
      crashed: status === "crash" && i === trace.length - 1,
    });
  });
  return frames;
}

/** Glyph for one cell, agent excluded (the renderer overlays the agent). */
export function cellGlyph(cell: Cell): string {
  if (cell.wall) return "█";
  if (cell.goal) return "★";
  if (cell.markers > 0) return String(cell.markers);
  return "";
}
