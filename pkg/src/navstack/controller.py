"""Deterministic path follower with obstacle-triggered stopping.

Consumes the same inputs a learned policy would (LiDAR scan, pose, cell
path) and produces velocity commands, so a trained model remains a
drop-in replacement. Scan ranges are clipped and normalized into [0, 1]
before use. Rules, in order: reach goal -> done; obstacle inside the
stop distance while roughly facing the target -> rotate in place away
from the nearer side; otherwise steer toward a lookahead waypoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyPath
from .grid import OccupancyGrid, cell_to_world
from .planner import GridPath
from .sim import Command, LidarScan, Pose2D, normalize_angle


@dataclass(frozen=True)
class ControllerParams:
    lookahead: float = 0.75       # m
    goal_tolerance: float = 0.25  # m
    stop_distance: float = 0.5    # m
    turn_gain: float = 1.5        # 1/s
    cruise_speed: float = 0.5     # m/s
    clip_range: float = 8.0       # m, scan normalization cap
    omega_max: float = 2.0        # rad/s, command clamp

    def __post_init__(self) -> None:
        for name in ("lookahead", "goal_tolerance", "stop_distance",
                     "turn_gain", "cruise_speed", "clip_range", "omega_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.goal_tolerance >= self.lookahead:
            raise ValueError("goal_tolerance must be < lookahead")
        if self.stop_distance >= self.clip_range:
            raise ValueError("stop_distance must be < clip_range")


@dataclass(frozen=True)
class Observation:
    """Clipped/normalized model input, matching the policy contract."""

    normalized_ranges: tuple[float, ...]  # each in [0, 1]
    heading_error: float                  # radians to current target waypoint
    distance_to_target: float             # meters


def normalize_scan(scan: LidarScan, clip_range: float) -> list[float]:
    """Clip each range to clip_range, then scale into [0, 1]."""
    if clip_range <= 0:
        raise ValueError("clip_range must be positive")
    return [min(r, clip_range) / clip_range for r in scan.ranges]


def target_waypoint(path: GridPath, grid: OccupancyGrid, pose: Pose2D,
                    params: ControllerParams,
                    min_index: int = 0) -> tuple[tuple[float, float], int]:
    """Steering target: greatest path cell within lookahead of the pose.

    Never regresses below the nearest-cell index nor below `min_index`,
    the caller's progress token, so the target only moves forward along
    the path during an episode.
    """
    if not path.cells:
        raise EmptyPath("path has no cells")
    centers = [cell_to_world(grid, c) for c in path.cells]
    dists = [math.hypot(cx - pose.x, cy - pose.y) for cx, cy in centers]

    nearest = min(range(len(dists)), key=lambda i: dists[i])
    index = nearest
    for i in range(len(dists) - 1, -1, -1):
        if dists[i] <= params.lookahead:
            index = max(i, nearest)
            break
    index = min(max(index, min_index), len(centers) - 1)
    return centers[index], index


def make_observation(pose: Pose2D, path: GridPath, grid: OccupancyGrid,
                     scan: LidarScan, params: ControllerParams,
                     min_index: int = 0) -> tuple[Observation, int]:
    waypoint, index = target_waypoint(path, grid, pose, params, min_index)
    bearing = math.atan2(waypoint[1] - pose.y, waypoint[0] - pose.x)
    heading_error = normalize_angle(bearing - pose.theta)
    distance = math.hypot(waypoint[0] - pose.x, waypoint[1] - pose.y)
    return Observation(tuple(normalize_scan(scan, params.clip_range)),
                       heading_error, distance), index


def next_command(pose: Pose2D, path: GridPath, grid: OccupancyGrid,
                 scan: LidarScan, params: ControllerParams,
                 min_index: int = 0) -> tuple[Command | None, int]:
    """One control decision. Returns (command, progress index); command
    is None once the pose is within goal_tolerance of the final cell.

    Pure function: identical inputs (including min_index) agree exactly.
    """
    if not path.cells:
        raise EmptyPath("path has no cells")
    goal = cell_to_world(grid, path.cells[-1])
    if math.hypot(goal[0] - pose.x, goal[1] - pose.y) <= params.goal_tolerance:
        return None, len(path.cells) - 1

    waypoint, index = target_waypoint(path, grid, pose, params, min_index)
    bearing = math.atan2(waypoint[1] - pose.y, waypoint[0] - pose.x)
    heading_error = normalize_angle(bearing - pose.theta)

    clipped = [min(r, params.clip_range) for r in scan.ranges]
    if min(clipped) < params.stop_distance and abs(heading_error) < math.pi / 4:
        # Obstacle dead ahead of where we want to go: spin away from the
        # nearer side (right rays have negative angles); ties go left.
        right_min = min((r for a, r in zip(scan.angles, clipped) if a < 0),
                        default=math.inf)
        left_min = min((r for a, r in zip(scan.angles, clipped) if a > 0),
                       default=math.inf)
        turn = params.turn_gain * math.pi / 4
        omega = turn if right_min <= left_min else -turn
        return Command(0.0, _clamp(omega, params.omega_max)), index

    v = params.cruise_speed * max(0.0, math.cos(heading_error))
    omega = _clamp(params.turn_gain * heading_error, params.omega_max)
    return Command(v, omega), index


def make_follower(path: GridPath, grid: OccupancyGrid, params: ControllerParams):
    """Episode controller for sim.run_episode, owning the progress token."""
    progress = 0

    def controller(pose: Pose2D, scan: LidarScan) -> Command | None:
        nonlocal progress
        cmd, progress = next_command(pose, path, grid, scan, params, progress)
        return cmd

    return controller


def _clamp(value: float, limit: float) -> float:
    return max(-limit, min(limit, value))
