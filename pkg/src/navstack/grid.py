"""Binary occupancy grid built from projected keyframe points.

Every cell starts occupied (1.0); cells a keyframe point fell in are
carved out as unoccupied (0.0). Values stay floats in [0, 1] so the
protocol's inclusive 0.5 classification rule stays meaningful. Row 0 is
the minimum-y row; cells are stored row-major (index = row*width+col).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import MalformedGrid, NoPoints, OutOfBounds

OCCUPIED_THRESHOLD = 0.5  # values >= threshold are obstacles (inclusive)

DEFAULT_CELL_SIZE = 0.25  # meters; finer than a wheelchair footprint
DEFAULT_PADDING = 2       # cells of occupied margin around the point extent


class GridIndex(NamedTuple):
    col: int
    row: int


@dataclass(frozen=True)
class OccupancyGrid:
    width: int
    height: int
    cell_size: float
    origin: tuple[float, float]  # world coords of cell (0,0)'s lower-left corner
    cells: tuple[float, ...]     # row-major, row 0 = minimum y

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be >= 1")
        if not (self.cell_size > 0) or not math.isfinite(self.cell_size):
            raise ValueError("cell_size must be positive")
        if len(self.cells) != self.width * self.height:
            raise ValueError("cells length != width*height")
        if any(not (0.0 <= v <= 1.0) for v in self.cells):
            raise ValueError("cell values must lie in [0, 1]")


def build_grid(points: list[tuple[float, float]], cell_size: float = DEFAULT_CELL_SIZE,
               padding: int = DEFAULT_PADDING) -> OccupancyGrid:
    """Carve unoccupied cells out of an all-occupied grid, one per point hit.

    The grid extent is the points' bounding box plus `padding` cells of
    occupied margin on every side. A single point yields a square
    (1 + 2*padding) grid rather than an error.
    """
    if not points:
        raise NoPoints("grid construction needs at least one point")
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    if padding < 0:
        raise ValueError("padding must be >= 0")

    min_x = min(p[0] for p in points)
    max_x = max(p[0] for p in points)
    min_y = min(p[1] for p in points)
    max_y = max(p[1] for p in points)

    width = int(math.floor((max_x - min_x) / cell_size)) + 1 + 2 * padding
    height = int(math.floor((max_y - min_y) / cell_size)) + 1 + 2 * padding
    origin = (min_x - padding * cell_size, min_y - padding * cell_size)

    cells = [1.0] * (width * height)
    for x, y in points:
        col = int(math.floor((x - origin[0]) / cell_size))
        row = int(math.floor((y - origin[1]) / cell_size))
        cells[row * width + col] = 0.0

    return OccupancyGrid(width, height, cell_size, origin, tuple(cells))


def world_to_cell(grid: OccupancyGrid, p: tuple[float, float]) -> GridIndex:
    """Cell containing world point p; lower/left edges belong to the cell."""
    col = int(math.floor((p[0] - grid.origin[0]) / grid.cell_size))
    row = int(math.floor((p[1] - grid.origin[1]) / grid.cell_size))
    if not (0 <= col < grid.width and 0 <= row < grid.height):
        raise OutOfBounds(f"point {p} outside grid extent")
    return GridIndex(col, row)


def cell_to_world(grid: OccupancyGrid, idx: GridIndex) -> tuple[float, float]:
    """World coordinates of the cell's center."""
    col, row = idx
    _check_bounds(grid, col, row)
    return (grid.origin[0] + (col + 0.5) * grid.cell_size,
            grid.origin[1] + (row + 0.5) * grid.cell_size)


def is_occupied(grid: OccupancyGrid, idx: GridIndex) -> bool:
    col, row = idx
    _check_bounds(grid, col, row)
    return grid.cells[row * grid.width + col] >= OCCUPIED_THRESHOLD


def free_cell_count(grid: OccupancyGrid) -> int:
    return sum(1 for v in grid.cells if v < OCCUPIED_THRESHOLD)


def grid_body(grid: OccupancyGrid) -> dict:
    """Interchange body: "type" first, remaining keys alphabetical."""
    return {
        "type": "map",
        "cell_size": grid.cell_size,
        "cells": list(grid.cells),
        "height": grid.height,
        "origin": [grid.origin[0], grid.origin[1]],
        "version": 1,
        "width": grid.width,
    }


def encode_grid(grid: OccupancyGrid) -> bytes:
    """Canonical JSON encoding; floats as shortest round-trip decimals."""
    return json.dumps(grid_body(grid), separators=(",", ":")).encode("utf-8")


def decode_grid(data: bytes) -> OccupancyGrid:
    try:
        raw = json.loads(data.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedGrid(f"not decodable: {exc}") from exc
    return grid_from_body(raw)


def grid_from_body(raw) -> OccupancyGrid:
    if not isinstance(raw, dict):
        raise MalformedGrid("grid body is not an object")
    if raw.get("type") != "map" or raw.get("version") != 1:
        raise MalformedGrid("not a version-1 map body")
    width = raw.get("width")
    height = raw.get("height")
    if not isinstance(width, int) or not isinstance(height, int) \
            or isinstance(width, bool) or isinstance(height, bool):
        raise MalformedGrid("width/height are not integers")
    cell_size = raw.get("cell_size")
    if isinstance(cell_size, bool) or not isinstance(cell_size, (int, float)):
        raise MalformedGrid("cell_size is not a number")
    origin = raw.get("origin")
    if not isinstance(origin, list) or len(origin) != 2 \
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in origin):
        raise MalformedGrid("origin is not a 2-vector")
    cells = raw.get("cells")
    if not isinstance(cells, list) \
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in cells):
        raise MalformedGrid("cells is not a numeric array")
    try:
        return OccupancyGrid(width, height, float(cell_size),
                             (float(origin[0]), float(origin[1])),
                             tuple(float(v) for v in cells))
    except ValueError as exc:
        raise MalformedGrid(str(exc)) from exc


def export_pgm(grid: OccupancyGrid) -> bytes:
    """P2 ASCII image: occupied=0 (black), unoccupied=255, top row = max row."""
    lines = [f"P2\n{grid.width} {grid.height}\n255"]
    for row in range(grid.height - 1, -1, -1):
        base = row * grid.width
        lines.append(" ".join(
            "0" if grid.cells[base + col] >= OCCUPIED_THRESHOLD else "255"
            for col in range(grid.width)))
    return ("\n".join(lines) + "\n").encode("ascii")


def _check_bounds(grid: OccupancyGrid, col: int, row: int) -> None:
    if not (0 <= col < grid.width and 0 <= row < grid.height):
        raise OutOfBounds(f"cell ({col}, {row}) outside {grid.width}x{grid.height} grid")
