// View state and its pure transition functions. All mutation flows
// through applyFrame / tapCell / setStatus so a recorded server
// transcript replays to a deterministic final state.

import { Cell, GridData, encodeSetGoal, parseServerFrame } from "./protocol.js";

export type ConnStatus = "connecting" | "open" | "closed";

export interface Position {
  cell: Cell;
  pose: [number, number, number];
}

export interface ViewState {
  grid: GridData | null;
  pendingGoal: Cell | null;       // tapped, awaiting path or error
  goal: Cell | null;              // last goal a path was received for
  path: Cell[] | null;
  position: Position | null;
  status: ConnStatus;
  notice: string | null;          // last error message, if any
  bufferedPosition: Position | null; // position that arrived before the map
}

export function initialState(): ViewState {
  return {
    grid: null,
    pendingGoal: null,
    goal: null,
    path: null,
    position: null,
    status: "connecting",
    notice: null,
    bufferedPosition: null,
  };
}

export function setStatus(view: ViewState, status: ConnStatus): ViewState {
  return { ...view, status };
}

function inBounds(grid: GridData, cell: Cell): boolean {
  return cell[0] >= 0 && cell[0] < grid.width && cell[1] >= 0 && cell[1] < grid.height;
}

/** Fold one inbound frame into the view; malformed frames change nothing. */
export function applyFrame(view: ViewState, raw: string): ViewState {
  const frame = parseServerFrame(raw);
  if (frame === null) {
    console.warn("malformed frame ignored", raw);
    return view;
  }
  switch (frame.kind) {
    case "map": {
      const next: ViewState = {
        ...view,
        grid: frame.grid,
        // stale overlays from a previous map no longer apply
        path: null,
        goal: null,
        pendingGoal: null,
        position: null,
      };
      if (view.bufferedPosition && inBounds(frame.grid, view.bufferedPosition.cell)) {
        next.position = view.bufferedPosition;
      }
      next.bufferedPosition = null;
      return next;
    }
    case "path": {
      if (!view.grid || frame.cells.some((c) => !inBounds(view.grid!, c))) {
        console.warn("path frame ignored (no grid or out of bounds)");
        return view;
      }
      return {
        ...view,
        path: frame.cells,
        goal: frame.cells[frame.cells.length - 1],
        pendingGoal: null,
      };
    }
    case "position": {
      if (!view.grid) {
        return { ...view, bufferedPosition: { cell: frame.cell, pose: frame.pose } };
      }
      if (!inBounds(view.grid, frame.cell)) {
        console.warn("position frame ignored (out of bounds)");
        return view;
      }
      return { ...view, position: { cell: frame.cell, pose: frame.pose } };
    }
    case "error":
      return {
        ...view,
        notice: `${frame.code}: ${frame.message}`,
        pendingGoal: null,
      };
    case "unknown":
      console.info("unknown frame type ignored", frame.type);
      return view;
  }
}

/**
 * User tapped a cell. Returns the updated view and the frame to send
 * (null when the tap must be ignored: not connected, no map yet, or
 * outside the grid).
 */
export function tapCell(view: ViewState, cell: Cell): { view: ViewState; frame: string | null } {
  if (view.status !== "open" || !view.grid || !inBounds(view.grid, cell)) {
    return { view, frame: null };
  }
  return {
    view: { ...view, pendingGoal: cell, notice: null },
    frame: encodeSetGoal(cell),
  };
}
