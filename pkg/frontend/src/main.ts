/** Page wiring: task picker, grid, block editor, run loop, feedback dialog.
 *
 * Boot -> pick task -> session -> edit/run with trace playback; on a
 * failed step A the assigned feedback dialog appears exactly once, then
 * step C re-enables the editor. The session id lives in the URL hash so
 * a refresh rehydrates the same server-side session.
 */

import { ApiClient } from "./api.js";
import { SessionController, ViewState } from "./controller.js";
import { BlockEditor, CONDITIONS } from "./editor.js";
import {
  AGENT_GLYPHS,
  Frame,
  GridModel,
  cellGlyph,
  fromQuizPayload,
  fromTaskDetail,
  playbackFrames,
} from "./grid.js";
import type { Block } from "./editor.js";

const PLAYBACK_STEPS_PER_SECOND = 4;

const api = new ApiClient("");
let controller: SessionController | null = null;
let editor: BlockEditor | null = null;
let playbackTimer: number | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

/** Render a grid, or an error panel when the payload cannot be parsed. */
function renderGridFrom(target: HTMLElement, make: () => GridModel): GridModel | null {
  try {
    const grid = make();
    renderGrid(target, grid);
    return grid;
  } catch (err) {
    target.innerHTML = "";
    const panel = document.createElement("div");
    panel.className = "error-panel";
    panel.textContent = `cannot render task: ${err}`;
    target.appendChild(panel);
    return null;
  }
}

function renderGrid(target: HTMLElement, grid: GridModel, frame?: Frame): void {
  target.innerHTML = "";
  target.style.setProperty("--n", String(grid.size));
  const agent = frame ? frame.agent : grid.agent;
  for (let r = 0; r < grid.size; r++) {
    for (let c = 0; c < grid.size; c++) {
      const cell = grid.cells[r][c];
      const div = document.createElement("div");
      div.className = "cell";
      if (cell.wall) div.classList.add("wall");
      if (cell.goal) div.classList.add("goal");
      if (agent.row === r && agent.col === c) {
        div.classList.add("agent");
        if (frame?.crashed) div.classList.add("crash");
        div.textContent = AGENT_GLYPHS[agent.dir];
      } else {
        div.textContent = cellGlyph(cell);
      }
      target.appendChild(div);
    }
  }
}

function renderEditor(): void {
  if (!editor) return;
  const palette = el<HTMLDivElement>("palette");
  palette.innerHTML = "";
  for (const kind of editor.palette) {
    const button = document.createElement("button");
    button.textContent = kind;
    button.onclick = () => {
      editor!.add(kind);
      renderEditor();
    };
    palette.appendChild(button);
  }
  const program = el<HTMLDivElement>("program");
  program.innerHTML = "";
  const renderBlocks = (blocks: Block[], container: HTMLElement, path: number[]): void => {
    blocks.forEach((block, i) => {
      const row = document.createElement("div");
      row.className = "block";
      const label = document.createElement("span");
      label.textContent = block.kind;
      row.appendChild(label);
      if (block.param !== undefined) {
        const select = document.createElement("select");
        const options =
          block.kind === "Repeat"
            ? Array.from({ length: 9 }, (_, k) => String(k + 2))
            : CONDITIONS;
        for (const option of options) {
          const opt = document.createElement("option");
          opt.value = option;
          opt.textContent = option;
          opt.selected = String(block.param) === option;
          select.appendChild(opt);
        }
        select.onchange = () => {
          editor!.setParam(block, select.value);
          renderEditor();
        };
        row.appendChild(select);
      }
      const drop = document.createElement("button");
      drop.textContent = "×";
      drop.onclick = () => {
        editor!.remove([...path, i]);
        renderEditor();
      };
      row.appendChild(drop);
      container.appendChild(row);
      if (block.kind !== "" && block.body) {
        const inner = document.createElement("div");
        inner.className = "body";
        renderBlocks(block.body, inner, [...path, i]);
        if (block.body.length === 0 && !["move", "turnLeft", "turnRight", "pickMarker", "putMarker"].includes(block.kind)) {
          inner.classList.add("empty");
        }
        if (inner.childNodes.length || inner.classList.contains("empty")) {
          container.appendChild(inner);
        }
      }
    });
  };
  renderBlocks(editor.blocks, program, []);
  el<HTMLTextAreaElement>("rawText").value = editor.rawMode ? editor.rawText : editor.toText();
}

function updateHud(view: ViewState): void {
  el("stepBadge").textContent = view.step ?? "-";
  el("triesBadge").textContent = String(view.triesLeft);
  el("statusLine").textContent = view.error ?? (view.lastRun ? `last run: ${view.lastRun.status}` : "");
  const runButton = el<HTMLButtonElement>("runButton");
  runButton.disabled = view.step !== "A" && view.step !== "C";
  el("feedbackPanel").classList.toggle("hidden", view.step !== "B");
  if (view.outcome) {
    el("endScreen").classList.remove("hidden");
    el("endScreen").textContent =
      view.outcome.startsWith("solved") ? "Solved! Nice work." : "Out of tries. The session is over.";
  }
}

async function showFeedback(view: ViewState): Promise<void> {
  if (!controller) return;
  const reply = await controller.requestFeedback();
  if (!reply) return;
  const dialog = el<HTMLDivElement>("dialog");
  dialog.classList.remove("hidden");
  el("dialogTitle").textContent = reply.method;
  if (reply.method === "PQuizSyn" && reply.quiz) {
    const quiz = reply.quiz;
    renderGridFrom(el("quizGrid"), () => fromQuizPayload(quiz));
    el("quizCode").textContent = reply.quiz.code;
    const choices = el<HTMLDivElement>("quizChoices");
    choices.innerHTML = "";
    reply.quiz.choices.forEach((choice, i) => {
      const button = document.createElement("button");
      button.textContent = choice;
      button.onclick = async () => {
        const correct = await controller!.answerQuiz(i);
        for (const b of choices.querySelectorAll("button")) b.disabled = true;
        el("dialogNote").textContent =
          correct === null ? "" : correct ? "Correct!" : "Not quite; back to the task.";
        el("dialogClose").classList.remove("hidden");
      };
      choices.appendChild(button);
    });
  } else if (reply.method === "NextStep") {
    el("dialogNote").textContent = `One step closer: ${reply.code}`;
    el("dialogClose").classList.remove("hidden");
  } else {
    el("dialogNote").textContent = "No hint this time; ten fresh tries.";
    el("dialogClose").classList.remove("hidden");
  }
}

function playTrace(view: ViewState): void {
  if (!controller || !view.task || !view.lastRun) return;
  const grid = fromTaskDetail(view.task);
  const frames = playbackFrames(view.task.agent, view.lastRun.trace, view.lastRun.status);
  const target = el<HTMLDivElement>("grid");
  let index = 0;
  if (playbackTimer !== null) window.clearInterval(playbackTimer);
  playbackTimer = window.setInterval(() => {
    renderGrid(target, grid, frames[index]);
    index += 1;
    if (index >= frames.length && playbackTimer !== null) {
      window.clearInterval(playbackTimer);
      playbackTimer = null;
    }
  }, 1000 / PLAYBACK_STEPS_PER_SECOND);
  el<HTMLButtonElement>("skipButton").onclick = () => {
    if (playbackTimer !== null) window.clearInterval(playbackTimer);
    playbackTimer = null;
    renderGrid(target, grid, frames[frames.length - 1]);
  };
}

async function boot(): Promise<void> {
  const tasks = await api.listTasks();
  const picker = el<HTMLSelectElement>("taskPicker");
  for (const task of tasks) {
    const option = document.createElement("option");
    option.value = task.id;
    option.textContent = `${task.id} (${task.kind}, ${task.size}x${task.size})`;
    picker.appendChild(option);
  }

  const hash = window.location.hash.slice(1);
  const [taskFromHash, sessionFromHash] = hash.split(":");

  el<HTMLButtonElement>("startButton").onclick = () => start(picker.value);
  if (taskFromHash && sessionFromHash) {
    await start(taskFromHash, sessionFromHash);
  }

  async function start(taskId: string, sessionId?: string): Promise<void> {
    controller = new SessionController(api, taskId);
    controller.onChange(updateHud);
    const view = await controller.start(sessionId);
    window.location.hash = `${taskId}:${view.sessionId}`;
    editor = new BlockEditor(view.task!.store);
    renderGridFrom(el("grid"), () => fromTaskDetail(view.task!));
    renderEditor();
    updateHud(view);
    el("workspace").classList.remove("hidden");

    el<HTMLButtonElement>("runButton").onclick = async () => {
      if (!editor || !controller) return;
      if (!editor.rawMode) {
        const problems = editor.emptyBodies();
        if (problems.length) {
          el("statusLine").textContent = problems[0];
          return;
        }
      }
      const result = await controller.run(editor.toText());
      const after = controller.state();
      if (result) playTrace(after);
      if (after.step === "B") showFeedback(after);
    };
    el<HTMLButtonElement>("rawToggle").onclick = () => {
      if (!editor) return;
      editor.rawText = editor.toText();
      editor.rawMode = !editor.rawMode;
      el("rawText").classList.toggle("hidden", !editor.rawMode);
      el("program").classList.toggle("hidden", editor.rawMode);
      el("palette").classList.toggle("hidden", editor.rawMode);
    };
    el<HTMLTextAreaElement>("rawText").oninput = (event) => {
      if (editor?.rawMode) editor.rawText = (event.target as HTMLTextAreaElement).value;
    };
    el<HTMLButtonElement>("dialogClose").onclick = () => {
      el("dialog").classList.add("hidden");
      controller?.resync();
    };
  }
}

boot().catch((err) => {
  document.body.textContent = `failed to load: ${err}`;
});
