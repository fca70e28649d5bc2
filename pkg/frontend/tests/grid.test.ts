import { describe, expect, it } from "vitest";

import {
  cellGlyph,
  fromQuizPayload,
  parseRows,
  parseTaskText,
  playbackFrames,
} from "../src/grid.js";

const HOC_TASK = `kind:hoc
size:4
####
#..+
#.##
####
agent:2,1,N
store:move,turnLeft,turnRight
maxblocks:5
`;

describe("parseTaskText", () => {
  it("reads size, cells and agent", () => {
    const grid = parseTaskText(HOC_TASK);
    expect(grid.kind).toBe("hoc");
    expect(grid.size).toBe(4);
    expect(grid.cells[0][0].wall).toBe(true);
    expect(grid.cells[1][3].goal).toBe(true);
    expect(grid.agent).toEqual({ row: 2, col: 1, dir: "N" });
  });

  it("reads marker counts", () => {
    const cells = parseRows(["#2.", "..9", "..."]);
    expect(cells[0][1].markers).toBe(2);
    expect(cells[1][2].markers).toBe(9);
    expect(cells[2][0].markers).toBe(0);
  });

  it("accepts a quiz payload", () => {
    const grid = fromQuizPayload({
      task: HOC_TASK,
      rows: [],
      code: "Run{__blank__}",
      choices: ["move"],
    });
    expect(grid.size).toBe(4);
  });
});

describe("playbackFrames", () => {
  it("starts at the initial pose and follows the trace", () => {
    const frames = playbackFrames(
      { row: 2, col: 1, dir: "N" },
      [
        { row: 2, col: 1, dir: "N", action: "move" },
        { row: 1, col: 1, dir: "N", action: "move" },
      ],
      "success",
    );
    expect(frames).toHaveLength(3);
    expect(frames[0].action).toBeNull();
    expect(frames[2].agent).toEqual({ row: 1, col: 1, dir: "N" });
    expect(frames.every((f) => !f.crashed)).toBe(true);
  });

  it("flags the crash frame", () => {
    const frames = playbackFrames(
      { row: 0, col: 0, dir: "E" },
      [{ row: 0, col: 0, dir: "E", action: "move" }],
      "crash",
    );
    expect(frames[1].crashed).toBe(true);
  });
});

describe("cellGlyph", () => {
  it("renders walls, goals and markers", () => {
    expect(cellGlyph({ wall: true, goal: false, markers: 0 })).toBe("█");
    expect(cellGlyph({ wall: false, goal: true, markers: 0 })).toBe("★");
    expect(cellGlyph({ wall: false, goal: false, markers: 3 })).toBe("3");
    expect(cellGlyph({ wall: false, goal: false, markers: 0 })).toBe("");
  });
});
