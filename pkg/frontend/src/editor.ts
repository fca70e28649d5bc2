/** Constrained block editor: compose programs from the task's palette.
 *
 * The editor holds a small block tree mirroring the code DSL and prints
 * it in the service's text format, so a palette-built program can never
 * have a syntax error. A raw-text mode sits behind a toggle for people
 * who prefer to type.
 */

export const ACTION_BLOCKS = ["move", "turnLeft", "turnRight", "pickMarker", "putMarker"];
export const CONSTRUCT_BLOCKS = ["Repeat", "RepeatUntil", "While", "If", "IfElse"];
export const CONDITIONS = [
  "pathAhead",
  "pathLeft",
  "pathRight",
  "noPathAhead",
  "markersPresent",
  "noMarkersPresent",
];

export interface Block {
  kind: string;
  param?: string | number; // repeat count or condition
  body: Block[];
  elseBody?: Block[];
}

export type BlockPath = number[]; // child indices into nested then-bodies

function isAction(kind: string): boolean {
  return ACTION_BLOCKS.includes(kind);
}

export class BlockEditor {
  readonly palette: string[];
  blocks: Block[] = [];
  rawMode = false;
  rawText = "Run{}";

  constructor(store: string[]) {
    this.palette = [...ACTION_BLOCKS, ...CONSTRUCT_BLOCKS].filter((b) => store.includes(b));
  }

  /** Body list addressed by a path; [] is the top level. */
  private bodyAt(path: BlockPath): Block[] {
    let body = this.blocks;
    for (const index of path) {
      const block = body[index];
      if (!block) throw new Error(`bad path segment ${index}`);
      body = block.body;
    }
    return body;
  }

  /** The then/else branch of an IfElse block. */
  branchOf(path: BlockPath, branch: "then" | "else"): Block[] {
    const parent = this.blockAt(path);
    if (parent.kind !== "IfElse") throw new Error("not an IfElse block");
    if (branch === "then") return parent.body;
    if (!parent.elseBody) parent.elseBody = [];
    return parent.elseBody;
  }

  blockAt(path: BlockPath): Block {
    if (path.length === 0) throw new Error("the root is not a block");
    const body = this.bodyAt(path.slice(0, -1));
    const block = body[path[path.length - 1]];
    if (!block) throw new Error("no block at path");
    return block;
  }

  /** Append a palette block to a body (default: the program top level). */
  add(kind: string, target: Block[] | null = null): Block {
    if (!this.palette.includes(kind)) {
      throw new Error(`${kind} is not in this task's palette`);
    }
    const body = target ?? this.blocks;
    const block: Block = { kind, body: [] };
    if (kind === "Repeat") block.param = 2;
    else if (["While", "If", "IfElse"].includes(kind)) block.param = "pathAhead";
    if (kind === "IfElse") block.elseBody = [];
    body.push(block);
    return block;
  }

  remove(path: BlockPath): void {
    const body = this.bodyAt(path.slice(0, -1));
    body.splice(path[path.length - 1], 1);
  }

  setParam(block: Block, param: string | number): void {
    if (block.kind === "Repeat") {
      const count = Number(param);
      if (!(count >= 2 && count <= 10)) throw new Error("repeat count must lie in 2..10");
      block.param = count;
    } else if (CONDITIONS.includes(String(param))) {
      block.param = String(param);
    } else {
      throw new Error(`bad parameter ${param}`);
    }
  }

  clear(): void {
    this.blocks = [];
  }

  /** Number of blocks, the quantity limited by the task's maxblocks. */
  blockCount(): number {
    const count = (body: Block[]): number =>
      body.reduce(
        (sum, b) => sum + 1 + count(b.body) + (b.elseBody ? count(b.elseBody) : 0),
        0,
      );
    return count(this.blocks);
  }

  /** Empty construct bodies make the program unrunnable; list them. */
  emptyBodies(): string[] {
    const problems: string[] = [];
    const walk = (body: Block[], where: string): void => {
      for (const block of body) {
        if (isAction(block.kind)) continue;
        if (block.body.length === 0) problems.push(`${block.kind} at ${where} has an empty body`);
        walk(block.body, `${where}/${block.kind}`);
        if (block.kind === "IfElse") {
          if (!block.elseBody || block.elseBody.length === 0) {
            problems.push(`IfElse at ${where} has an empty else branch`);
          }
          walk(block.elseBody ?? [], `${where}/else`);
        }
      }
    };
    walk(this.blocks, "top");
    if (this.blocks.length === 0) problems.push("the program is empty");
    return problems;
  }

  toText(): string {
    if (this.rawMode) return this.rawText;
    const stmt = (block: Block): string => {
      if (isAction(block.kind)) return block.kind;
      const body = block.body.map(stmt).join(";");
      switch (block.kind) {
        case "Repeat":
          return `Repeat(${block.param}){${body}}`;
        case "RepeatUntil":
          return `RepeatUntil(goal){${body}}`;
        case "While":
          return `While(${block.param}){${body}}`;
        case "If":
          return `If(${block.param}){${body}}`;
        case "IfElse": {
          const elseBody = (block.elseBody ?? []).map(stmt).join(";");
          return `IfElse(${block.param}){${body}}{${elseBody}}`;
        }
        default:
          throw new Error(`unknown block ${block.kind}`);
      }
    };
    return `Run{${this.blocks.map(stmt).join(";")}}`;
  }
}
