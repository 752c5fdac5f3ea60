from pathlib import Path

import pytest

from navstack.grid import OccupancyGrid, build_grid

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture()
def small_grid() -> OccupancyGrid:
    """The 5x3 two-free-cell grid from the map fixture."""
    return build_grid([(0.5, 0.5), (2.5, 0.5)], cell_size=1.0, padding=1)


@pytest.fixture()
def corridor_grid() -> OccupancyGrid:
    """7x3 grid with a straight free corridor along row 1, cols 1..5."""
    return build_grid([(x * 0.5, 0.5) for x in range(1, 10)], cell_size=1.0, padding=1)


def make_grid(rows: list[str]) -> OccupancyGrid:
    """Build a grid from ASCII art; '#' occupied, '.' free; top line = max row."""
    height = len(rows)
    width = len(rows[0])
    cells = [1.0] * (width * height)
    for r, line in enumerate(rows):
        assert len(line) == width
        row = height - 1 - r
        for c, ch in enumerate(line):
            cells[row * width + c] = 1.0 if ch == "#" else 0.0
    return OccupancyGrid(width, height, 1.0, (0.0, 0.0), tuple(cells))
