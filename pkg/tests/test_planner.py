import heapq
import math
import random
from collections import deque

import pytest

from navstack.errors import (
    GoalOccupied,
    NoFreeCells,
    NoPath,
    OutOfBounds,
    StartOccupied,
)
from navstack.grid import GridIndex, OccupancyGrid, is_occupied
from navstack.planner import (
    EIGHT_CONNECTED,
    FOUR_CONNECTED,
    SQRT2,
    heuristic,
    plan,
    snap_to_free,
)
from conftest import make_grid


# -- independent oracles -------------------------------------------------------

def neighbors(grid, cell, connectivity):
    col, row = cell
    free = lambda c, r: (0 <= c < grid.width and 0 <= r < grid.height
                         and grid.cells[r * grid.width + c] < 0.5)
    out = []
    for dc, dr in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        if free(col + dc, row + dr):
            out.append(((col + dc, row + dr), 1.0))
    if connectivity == EIGHT_CONNECTED:
        for dc, dr in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            if free(col + dc, row + dr) and free(col + dc, row) and free(col, row + dr):
                out.append(((col + dc, row + dr), SQRT2))
    return out


def bfs_distance(grid, start, goal):
    """Hop count oracle for 4-connected grids; None when unreachable."""
    start, goal = tuple(start), tuple(goal)
    seen = {start: 0}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        if cell == goal:
            return seen[cell]
        for nxt, _cost in neighbors(grid, cell, FOUR_CONNECTED):
            if nxt not in seen:
                seen[nxt] = seen[cell] + 1
                queue.append(nxt)
    return None


def dijkstra_distance(grid, start, goal, connectivity):
    start, goal = tuple(start), tuple(goal)
    dist = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, cell = heapq.heappop(heap)
        if cell in done:
            continue
        done.add(cell)
        if cell == goal:
            return d
        for nxt, cost in neighbors(grid, cell, connectivity):
            nd = d + cost
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    return None


def random_grid(rng, width, height, density):
    cells = [1.0 if rng.random() < density else 0.0 for _ in range(width * height)]
    return OccupancyGrid(width, height, 1.0, (0.0, 0.0), tuple(cells))


def free_cells(grid):
    return [GridIndex(i % grid.width, i // grid.width)
            for i, v in enumerate(grid.cells) if v < 0.5]


def check_path_invariants(grid, path, start, goal, connectivity):
    assert path.cells[0] == start
    assert path.cells[-1] == goal
    assert len(set(path.cells)) == len(path.cells)
    total = 0.0
    for a, b in zip(path.cells, path.cells[1:]):
        dc, dr = abs(a[0] - b[0]), abs(a[1] - b[1])
        if connectivity == FOUR_CONNECTED:
            assert dc + dr == 1
            total += 1.0
        else:
            assert max(dc, dr) == 1
            total += SQRT2 if dc + dr == 2 else 1.0
    for cell in path.cells:
        assert not is_occupied(grid, cell)
    assert path.cost == pytest.approx(total, abs=1e-9)


# -- heuristic -------------------------------------------------------------------

class TestHeuristic:
    def test_manhattan(self):
        assert heuristic(GridIndex(0, 0), GridIndex(3, 4), FOUR_CONNECTED) == 7

    def test_identity(self):
        assert heuristic(GridIndex(2, 2), GridIndex(2, 2), FOUR_CONNECTED) == 0
        assert heuristic(GridIndex(2, 2), GridIndex(2, 2), EIGHT_CONNECTED) == 0

    def test_octile(self):
        expected = 4 + 3 * (SQRT2 - 1)  # = 5.2426...
        assert heuristic(GridIndex(0, 0), GridIndex(3, 4), EIGHT_CONNECTED) == \
            pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(5.242640687, abs=1e-9)

    def test_symmetry(self):
        rng = random.Random(0)
        for _ in range(50):
            a = GridIndex(rng.randrange(20), rng.randrange(20))
            b = GridIndex(rng.randrange(20), rng.randrange(20))
            for conn in (FOUR_CONNECTED, EIGHT_CONNECTED):
                assert heuristic(a, b, conn) == heuristic(b, a, conn)

    def test_admissible_on_empty_grid_exhaustive(self):
        grid = OccupancyGrid(10, 10, 1.0, (0.0, 0.0), (0.0,) * 100)
        cells = [GridIndex(c, r) for r in range(10) for c in range(10)]
        for conn in (FOUR_CONNECTED, EIGHT_CONNECTED):
            for a in cells:
                dist = {tuple(a): 0.0}
                heap = [(0.0, tuple(a))]
                while heap:
                    d, cell = heapq.heappop(heap)
                    if d > dist.get(cell, math.inf):
                        continue
                    for nxt, cost in neighbors(grid, cell, conn):
                        if d + cost < dist.get(nxt, math.inf):
                            dist[nxt] = d + cost
                            heapq.heappush(heap, (d + cost, nxt))
                for b in cells:
                    assert heuristic(a, b, conn) <= dist[tuple(b)] + 1e-9


# -- plan --------------------------------------------------------------------------

class TestPlan:
    def test_empty_grid_corner_to_corner(self):
        grid = OccupancyGrid(3, 3, 1.0, (0.0, 0.0), (0.0,) * 9)
        path = plan(grid, GridIndex(0, 0), GridIndex(2, 2))
        assert path.cost == 4.0
        assert len(path.cells) == 5

    def test_start_equals_goal(self):
        grid = OccupancyGrid(3, 3, 1.0, (0.0, 0.0), (0.0,) * 9)
        path = plan(grid, GridIndex(1, 1), GridIndex(1, 1))
        assert path.cells == (GridIndex(1, 1),)
        assert path.cost == 0.0

    def test_four_connected_cost_is_cells_minus_one(self):
        rng = random.Random(7)
        grid = random_grid(rng, 20, 20, 0.3)
        cells = free_cells(grid)
        for _ in range(20):
            start, goal = rng.choice(cells), rng.choice(cells)
            expected = bfs_distance(grid, start, goal)
            try:
                path = plan(grid, start, goal, FOUR_CONNECTED)
            except NoPath:
                assert expected is None
            else:
                assert expected == len(path.cells) - 1
                assert path.cost == float(expected)

    def test_detour_around_wall(self):
        grid = make_grid([
            ".#.",
            ".#.",
            "...",
        ])
        path = plan(grid, GridIndex(0, 2), GridIndex(2, 2))
        assert path.cost == 6.0
        check_path_invariants(grid, path, GridIndex(0, 2), GridIndex(2, 2), FOUR_CONNECTED)

    def test_no_corner_cutting(self):
        grid = make_grid([
            "#.",
            ".#",
        ])
        with pytest.raises(NoPath):
            plan(grid, GridIndex(0, 0), GridIndex(1, 1), EIGHT_CONNECTED)

    def test_diagonal_blocked_one_side_detours(self):
        grid = make_grid([
            "#.",
            "..",
        ])
        path = plan(grid, GridIndex(0, 0), GridIndex(1, 1), EIGHT_CONNECTED)
        assert path.cost == 2.0  # around, not through the blocked corner
        assert path.cells == (GridIndex(0, 0), GridIndex(1, 0), GridIndex(1, 1))

    def test_free_diagonal_is_direct(self):
        grid = make_grid([
            "..",
            "..",
        ])
        path = plan(grid, GridIndex(0, 0), GridIndex(1, 1), EIGHT_CONNECTED)
        assert path.cost == pytest.approx(SQRT2)

    def test_errors(self):
        grid = make_grid([
            ".#",
            ".#",
        ])
        with pytest.raises(StartOccupied):
            plan(grid, GridIndex(1, 0), GridIndex(0, 0))
        with pytest.raises(GoalOccupied):
            plan(grid, GridIndex(0, 0), GridIndex(1, 1))
        with pytest.raises(OutOfBounds):
            plan(grid, GridIndex(-1, 0), GridIndex(0, 0))
        with pytest.raises(OutOfBounds):
            plan(grid, GridIndex(0, 0), GridIndex(0, 5))
        with pytest.raises(ValueError):
            plan(grid, GridIndex(0, 0), GridIndex(0, 1), 6)

    def test_half_occupied_cell_rejected(self):
        grid = OccupancyGrid(2, 1, 1.0, (0.0, 0.0), (0.5, 0.0))
        with pytest.raises(StartOccupied):
            plan(grid, GridIndex(0, 0), GridIndex(1, 0))

    def test_optimal_vs_dijkstra_both_connectivities(self):
        rng = random.Random(123)
        for trial in range(40):
            grid = random_grid(rng, rng.randrange(5, 30), rng.randrange(5, 30),
                               rng.uniform(0.1, 0.4))
            cells = free_cells(grid)
            if len(cells) < 2:
                continue
            start, goal = rng.choice(cells), rng.choice(cells)
            for conn in (FOUR_CONNECTED, EIGHT_CONNECTED):
                expected = dijkstra_distance(grid, start, goal, conn)
                try:
                    path = plan(grid, start, goal, conn)
                except NoPath:
                    assert expected is None
                else:
                    assert path.cost == pytest.approx(expected, abs=1e-9)
                    check_path_invariants(grid, path, start, goal, conn)

    def test_deterministic_cell_sequence(self):
        rng = random.Random(5)
        grid = random_grid(rng, 25, 25, 0.25)
        cells = free_cells(grid)
        start, goal = cells[0], cells[-1]
        for conn in (FOUR_CONNECTED, EIGHT_CONNECTED):
            try:
                first = plan(grid, start, goal, conn)
            except NoPath:
                continue
            for _ in range(3):
                assert plan(grid, start, goal, conn).cells == first.cells


# -- snap_to_free ---------------------------------------------------------------------

class TestSnap:
    def test_already_free(self):
        grid = make_grid(["..", ".."])
        assert snap_to_free(grid, GridIndex(1, 1)) == (1, 1)

    def test_unique_candidate(self):
        cells = [1.0] * 36
        cells[0] = 0.0  # only (0,0) free
        grid = OccupancyGrid(6, 6, 1.0, (0.0, 0.0), tuple(cells))
        assert snap_to_free(grid, GridIndex(5, 5)) == (0, 0)

    def test_tie_breaks_by_smaller_row_then_col(self):
        # free cells (2,1) and (1,2) are both at distance 1 from (2,2)
        cells = [1.0] * 16
        cells[1 * 4 + 2] = 0.0
        cells[2 * 4 + 1] = 0.0
        grid = OccupancyGrid(4, 4, 1.0, (0.0, 0.0), tuple(cells))
        assert snap_to_free(grid, GridIndex(2, 2)) == (2, 1)  # row 1 beats row 2

    def test_matches_exhaustive_scan_oracle(self):
        rng = random.Random(77)
        for _ in range(30):
            grid = random_grid(rng, 12, 9, 0.7)
            best = None
            query = GridIndex(rng.randrange(12), rng.randrange(9))
            for r in range(grid.height):
                for c in range(grid.width):
                    if grid.cells[r * grid.width + c] < 0.5:
                        key = ((c - query.col) ** 2 + (r - query.row) ** 2, r, c)
                        if best is None or key < best:
                            best = key
            if best is None:
                with pytest.raises(NoFreeCells):
                    snap_to_free(grid, query)
            else:
                expected = (best[2], best[1])
                got = snap_to_free(grid, query)
                if grid.cells[query.row * grid.width + query.col] < 0.5:
                    assert got == query
                else:
                    assert got == expected

    def test_no_free_cells(self):
        grid = OccupancyGrid(2, 2, 1.0, (0.0, 0.0), (1.0,) * 4)
        with pytest.raises(NoFreeCells):
            snap_to_free(grid, GridIndex(0, 0))

    def test_out_of_bounds_query(self):
        grid = make_grid([".."])
        with pytest.raises(OutOfBounds):
            snap_to_free(grid, GridIndex(5, 0))
