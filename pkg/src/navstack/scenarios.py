"""Synthetic test environments.

The L-shaped corridor mirrors the kind of space the wheelchair trial
drove: a mapping pass is emulated by dropping one keyframe at the center
of every corridor cell, so ingesting the resulting map database carves
exactly the corridor out of the occupancy grid.
"""

from __future__ import annotations

from .mapdb import Keyframe, MapDatabase, serialize_map

CAMERA_HEIGHT = 1.5  # meters, the dropped (gravity) axis coordinate


def l_corridor_database(long_m: float = 10.0, tall_m: float = 6.0,
                        leg_width_m: float = 2.0,
                        spacing: float = 0.25) -> MapDatabase:
    """Keyframe trail sweeping an L-shaped corridor.

    The horizontal leg spans x in [0, long_m), y in [0, leg_width_m); the
    vertical leg spans x in [long_m - leg_width_m, long_m), y in
    [0, tall_m). One keyframe per `spacing` cell, at the cell center.
    """
    points = []
    nx = int(round(long_m / spacing))
    ny = int(round(leg_width_m / spacing))
    for c in range(nx):
        for r in range(ny):
            points.append(((c + 0.5) * spacing, (r + 0.5) * spacing))
    vx0 = nx - int(round(leg_width_m / spacing))
    for c in range(vx0, nx):
        for r in range(ny, int(round(tall_m / spacing))):
            points.append(((c + 0.5) * spacing, (r + 0.5) * spacing))

    keyframes = tuple(
        Keyframe(i, (1.0, 0.0, 0.0, 0.0), (-x, -CAMERA_HEIGHT, -y))
        for i, (x, y) in enumerate(points))
    return MapDatabase(1, keyframes)


def l_corridor_map_bytes(**kwargs) -> bytes:
    return serialize_map(l_corridor_database(**kwargs))


def l_corridor_endpoints(long_m: float = 10.0, tall_m: float = 6.0,
                         leg_width_m: float = 2.0) -> tuple[tuple[float, float],
                                                            tuple[float, float]]:
    """World start/goal on the leg centerlines, clear of the end walls."""
    start = (0.875, leg_width_m / 2 - 0.125)
    goal = (long_m - leg_width_m / 2 - 0.125, tall_m - 0.625)
    return start, goal
