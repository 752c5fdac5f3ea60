"""A* search over the occupancy grid.

Default motion is 4-connected (90-degree moves, unit cost); 8-connected
adds sqrt(2)-cost diagonals that may not cut occupied corners. Costs are
per-cell; multiply by cell_size for world length. Tie-breaking is fixed
so identical inputs always return the identical cell sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush

from .errors import GoalOccupied, NoFreeCells, NoPath, OutOfBounds, StartOccupied
from .grid import OCCUPIED_THRESHOLD, GridIndex, OccupancyGrid

FOUR_CONNECTED = 4
EIGHT_CONNECTED = 8

SQRT2 = math.sqrt(2.0)

_ORTHO_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))
_DIAG_STEPS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class GridPath:
    cells: tuple[GridIndex, ...]
    cost: float


def heuristic(a: GridIndex, b: GridIndex, connectivity: int = FOUR_CONNECTED) -> float:
    """Manhattan distance (4-connected) or octile distance (8-connected).

    Both are admissible and consistent for the unit/sqrt(2) step costs.
    """
    dc = abs(a[0] - b[0])
    dr = abs(a[1] - b[1])
    if connectivity == FOUR_CONNECTED:
        return float(dc + dr)
    if connectivity == EIGHT_CONNECTED:
        return max(dc, dr) + (SQRT2 - 1.0) * min(dc, dr)
    raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")


def plan(grid: OccupancyGrid, start: GridIndex, goal: GridIndex,
         connectivity: int = FOUR_CONNECTED) -> GridPath:
    """Minimum-cost path from start to goal over unoccupied cells.

    Ties on f = g+h pop the smaller h first, then insertion order, which
    pins the returned path across runs. Diagonal moves are legal only
    when both flanking orthogonal cells are unoccupied.
    """
    if connectivity not in (FOUR_CONNECTED, EIGHT_CONNECTED):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    width, height = grid.width, grid.height
    for name, (col, row) in (("start", start), ("goal", goal)):
        if not (0 <= col < width and 0 <= row < height):
            raise OutOfBounds(f"{name} cell ({col}, {row}) outside grid")
    free = [v < OCCUPIED_THRESHOLD for v in grid.cells]
    if not free[start[1] * width + start[0]]:
        raise StartOccupied(f"start cell {tuple(start)} is occupied")
    if not free[goal[1] * width + goal[0]]:
        raise GoalOccupied(f"goal cell {tuple(goal)} is occupied")

    start = GridIndex(*start)
    goal = GridIndex(*goal)
    if start == goal:
        return GridPath((start,), 0.0)

    g_score = {start: 0.0}
    came_from: dict[GridIndex, GridIndex] = {}
    closed: set[GridIndex] = set()
    seq = 0
    h0 = heuristic(start, goal, connectivity)
    open_heap = [(h0, h0, seq, start)]

    while open_heap:
        _, _, _, current = heappop(open_heap)
        if current in closed:
            continue
        if current == goal:
            return _reconstruct(came_from, current, g_score[current])
        closed.add(current)
        col, row = current
        g_here = g_score[current]

        for dc, dr in _ORTHO_STEPS:
            nc, nr = col + dc, row + dr
            if not (0 <= nc < width and 0 <= nr < height) or not free[nr * width + nc]:
                continue
            neighbor = GridIndex(nc, nr)
            tentative = g_here + 1.0
            if tentative < g_score.get(neighbor, math.inf):
                g_score[neighbor] = tentative
                came_from[neighbor] = current
                h = heuristic(neighbor, goal, connectivity)
                seq += 1
                heappush(open_heap, (tentative + h, h, seq, neighbor))

        if connectivity == EIGHT_CONNECTED:
            for dc, dr in _DIAG_STEPS:
                nc, nr = col + dc, row + dr
                if not (0 <= nc < width and 0 <= nr < height) or not free[nr * width + nc]:
                    continue
                # no corner cutting: both flanking orthogonals must be free
                if not free[row * width + nc] or not free[nr * width + col]:
                    continue
                neighbor = GridIndex(nc, nr)
                tentative = g_here + SQRT2
                if tentative < g_score.get(neighbor, math.inf):
                    g_score[neighbor] = tentative
                    came_from[neighbor] = current
                    h = heuristic(neighbor, goal, connectivity)
                    seq += 1
                    heappush(open_heap, (tentative + h, h, seq, neighbor))

    raise NoPath(f"no path from {tuple(start)} to {tuple(goal)}")


def snap_to_free(grid: OccupancyGrid, idx: GridIndex) -> GridIndex:
    """idx if unoccupied, else nearest unoccupied cell by center distance.

    Ties break toward the smaller row, then the smaller col.
    """
    col, row = idx
    if not (0 <= col < grid.width and 0 <= row < grid.height):
        raise OutOfBounds(f"cell ({col}, {row}) outside grid")
    if grid.cells[row * grid.width + col] < OCCUPIED_THRESHOLD:
        return GridIndex(col, row)

    best = None
    best_key = None
    for r in range(grid.height):
        base = r * grid.width
        for c in range(grid.width):
            if grid.cells[base + c] < OCCUPIED_THRESHOLD:
                d2 = (c - col) ** 2 + (r - row) ** 2
                key = (d2, r, c)
                if best_key is None or key < best_key:
                    best_key = key
                    best = GridIndex(c, r)
    if best is None:
        raise NoFreeCells("grid has no unoccupied cell")
    return best


def _reconstruct(came_from: dict, current: GridIndex, cost: float) -> GridPath:
    cells = [current]
    while current in came_from:
        current = came_from[current]
        cells.append(current)
    cells.reverse()
    return GridPath(tuple(cells), cost)
