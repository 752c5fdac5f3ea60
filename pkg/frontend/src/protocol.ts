// Wire protocol: JSON text frames, one message per frame.
// The client only ever sends get_map / set_goal / set_start.

export type Cell = [number, number];

export interface GridData {
  width: number;
  height: number;
  cellSize: number;
  origin: [number, number];
  cells: number[];
}

export type ServerFrame =
  | { kind: "map"; grid: GridData }
  | { kind: "path"; cells: Cell[]; cost: number }
  | { kind: "position"; cell: Cell; pose: [number, number, number] }
  | { kind: "error"; code: string; message: string }
  | { kind: "unknown"; type: string };

export const OCCUPIED_THRESHOLD = 0.5; // inclusive: value >= 0.5 is an obstacle

export function isOccupied(value: number): boolean {
  return value >= OCCUPIED_THRESHOLD;
}

export function encodeGetMap(): string {
  return '{"type":"get_map"}';
}

export function encodeSetGoal(cell: Cell): string {
  return JSON.stringify({ type: "set_goal", cell });
}

export function encodeSetStart(cell: Cell): string {
  return JSON.stringify({ type: "set_start", cell });
}

/** Parse one server frame; null means malformed (log and ignore). */
export function parseServerFrame(raw: string): ServerFrame | null {
  let body: unknown;
  try {
    body = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof body !== "object" || body === null) return null;
  const obj = body as Record<string, unknown>;
  if (typeof obj.type !== "string") return null;

  switch (obj.type) {
    case "map": {
      const grid = parseGrid(obj);
      return grid ? { kind: "map", grid } : null;
    }
    case "path": {
      if (!Array.isArray(obj.cells) || obj.cells.length === 0) return null;
      const cells: Cell[] = [];
      for (const c of obj.cells) {
        if (!isCell(c)) return null;
        cells.push([c[0], c[1]]);
      }
      if (typeof obj.cost !== "number" || obj.cost < 0) return null;
      return { kind: "path", cells, cost: obj.cost };
    }
    case "position": {
      if (!isCell(obj.cell)) return null;
      const pose = obj.pose;
      if (!Array.isArray(pose) || pose.length !== 3 ||
          pose.some((v) => typeof v !== "number" || !Number.isFinite(v))) {
        return null;
      }
      return {
        kind: "position",
        cell: [obj.cell[0], obj.cell[1]],
        pose: [pose[0], pose[1], pose[2]] as [number, number, number],
      };
    }
    case "error": {
      if (typeof obj.code !== "string" || typeof obj.message !== "string") return null;
      return { kind: "error", code: obj.code, message: obj.message };
    }
    default:
      // forward compatible: new frame types are ignored, not fatal
      return { kind: "unknown", type: obj.type };
  }
}

function isCell(value: unknown): value is Cell {
  return Array.isArray(value) && value.length === 2 &&
    Number.isInteger(value[0]) && Number.isInteger(value[1]);
}

function parseGrid(obj: Record<string, unknown>): GridData | null {
  if (obj.version !== 1) return null;
  const width = obj.width;
  const height = obj.height;
  const cellSize = obj.cell_size;
  const origin = obj.origin;
  const cells = obj.cells;
  if (!Number.isInteger(width) || (width as number) < 1) return null;
  if (!Number.isInteger(height) || (height as number) < 1) return null;
  if (typeof cellSize !== "number" || cellSize <= 0) return null;
  if (!Array.isArray(origin) || origin.length !== 2 ||
      origin.some((v) => typeof v !== "number")) return null;
  if (!Array.isArray(cells) || cells.length !== (width as number) * (height as number) ||
      cells.some((v) => typeof v !== "number" || v < 0 || v > 1)) return null;
  return {
    width: width as number,
    height: height as number,
    cellSize,
    origin: [origin[0], origin[1]] as [number, number],
    cells: cells as number[],
  };
}
