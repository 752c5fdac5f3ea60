// Canvas renderer: one square per grid cell, fit to the viewport.
// Row 0 is the minimum-y row, so it draws at the bottom.

import { isOccupied } from "./protocol.js";
import { ViewState } from "./state.js";

export const COLORS = {
  occupied: "#2b5fd9",    // blue obstacles
  unoccupied: "#3aa655",  // green traversable space
  path: "#f2d22e",        // yellow path overlay
  position: "#e03131",    // red live marker
  selection: "#ffffff",   // white outline on the pending goal
  gridLine: "#00000033",
};

export function render(view: ViewState, canvas: HTMLCanvasElement): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const grid = view.grid;
  if (!grid) {
    ctx.fillStyle = "#666";
    ctx.font = "16px sans-serif";
    ctx.fillText("waiting for map...", 16, 32);
    return;
  }

  const px = cellPixels(grid.width, grid.height, canvas.width, canvas.height);

  for (let row = 0; row < grid.height; row++) {
    for (let col = 0; col < grid.width; col++) {
      const value = grid.cells[row * grid.width + col];
      ctx.fillStyle = isOccupied(value) ? COLORS.occupied : COLORS.unoccupied;
      const [x, y] = cellOrigin(col, row, grid.height, px);
      ctx.fillRect(x, y, px, px);
      ctx.strokeStyle = COLORS.gridLine;
      ctx.lineWidth = 1;
      ctx.strokeRect(x + 0.5, y + 0.5, px - 1, px - 1);
    }
  }

  if (view.path) {
    ctx.fillStyle = COLORS.path;
    for (const [col, row] of view.path) {
      const [x, y] = cellOrigin(col, row, grid.height, px);
      ctx.fillRect(x + px * 0.2, y + px * 0.2, px * 0.6, px * 0.6);
    }
  }

  if (view.position) {
    const [col, row] = view.position.cell;
    const [x, y] = cellOrigin(col, row, grid.height, px);
    ctx.fillStyle = COLORS.position;
    ctx.beginPath();
    ctx.arc(x + px / 2, y + px / 2, px * 0.35, 0, 2 * Math.PI);
    ctx.fill();
  }

  if (view.pendingGoal) {
    const [col, row] = view.pendingGoal;
    const [x, y] = cellOrigin(col, row, grid.height, px);
    ctx.strokeStyle = COLORS.selection;
    ctx.lineWidth = 2;
    ctx.strokeRect(x + 1, y + 1, px - 2, px - 2);
  }
}

export function cellPixels(cols: number, rows: number,
                           canvasW: number, canvasH: number): number {
  return Math.max(2, Math.floor(Math.min(canvasW / cols, canvasH / rows)));
}

export function cellOrigin(col: number, row: number, rows: number,
                           px: number): [number, number] {
  return [col * px, (rows - 1 - row) * px];
}

/** Inverse of the drawing transform: canvas pixel to cell, or null. */
export function pixelToCell(view: ViewState, canvas: HTMLCanvasElement,
                            x: number, y: number): [number, number] | null {
  const grid = view.grid;
  if (!grid) return null;
  const px = cellPixels(grid.width, grid.height, canvas.width, canvas.height);
  const col = Math.floor(x / px);
  const row = grid.height - 1 - Math.floor(y / px);
  if (col < 0 || col >= grid.width || row < 0 || row >= grid.height) return null;
  return [col, row];
}
