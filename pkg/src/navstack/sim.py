"""Differential-drive vehicle simulation inside an occupancy grid.

Unicycle kinematics with explicit Euler at a fixed step. The wheelchair's
motor mismatch is modeled as a multiplicative gain on the right wheel:
the command is decomposed into wheel speeds over the track width, the
right wheel is scaled by (1+a), and the perturbed (v, omega) is
recomposed. The LiDAR is a noise-free ray caster over a forward sector,
walking grid cells exactly (DDA) to the first occupied-cell boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import (
    CommandOutOfLimits,
    InvalidDt,
    InvalidRayCount,
    InvalidSector,
    StartInObstacle,
)
from .grid import OCCUPIED_THRESHOLD, OccupancyGrid, is_occupied, world_to_cell

TAU = 2.0 * math.pi

DEFAULT_DT = 0.05            # s
DEFAULT_TRACK_WIDTH = 0.5    # m
DEFAULT_V_MAX = 1.0          # m/s
DEFAULT_OMEGA_MAX = 2.0      # rad/s

DEFAULT_SECTOR = math.pi / 2  # 90-degree forward sector
DEFAULT_N_RAYS = 90
DEFAULT_MAX_RANGE = 8.0      # m


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    theta: float  # radians, CCW from +x, in (-pi, pi]


class Command(NamedTuple):
    v: float      # m/s
    omega: float  # rad/s


@dataclass(frozen=True)
class LidarScan:
    angles: tuple[float, ...]  # relative to heading, strictly ascending
    ranges: tuple[float, ...]  # meters, each in (0, max_range]
    max_range: float


@dataclass
class SimState:
    pose: Pose2D
    grid: OccupancyGrid
    asymmetry: float = 0.0           # right-wheel gain is (1 + asymmetry)
    track_width: float = DEFAULT_TRACK_WIDTH
    v_max: float = DEFAULT_V_MAX
    omega_max: float = DEFAULT_OMEGA_MAX
    collided: bool = False
    time: float = 0.0


def normalize_angle(theta: float) -> float:
    """Wrap into (-pi, pi]; values already in range pass through unchanged."""
    if -math.pi < theta <= math.pi:
        return theta
    theta = math.remainder(theta, TAU)
    return math.pi if theta <= -math.pi else theta


def create_world(grid: OccupancyGrid, start: Pose2D, asymmetry: float = 0.0,
                 track_width: float = DEFAULT_TRACK_WIDTH,
                 v_max: float = DEFAULT_V_MAX,
                 omega_max: float = DEFAULT_OMEGA_MAX) -> SimState:
    """New simulation with the vehicle parked at `start` (must be free)."""
    if asymmetry < 0:
        raise ValueError("asymmetry must be >= 0")
    cell = world_to_cell(grid, (start.x, start.y))  # OutOfBounds if outside
    if is_occupied(grid, cell):
        raise StartInObstacle(f"start {start.x, start.y} lies in occupied cell {tuple(cell)}")
    pose = Pose2D(start.x, start.y, normalize_angle(start.theta))
    return SimState(pose=pose, grid=grid, asymmetry=asymmetry,
                    track_width=track_width, v_max=v_max, omega_max=omega_max)


def step(state: SimState, cmd: Command, dt: float) -> SimState:
    """Advance one Euler step; revert pose and latch `collided` on impact."""
    if not (0.0 < dt <= 0.5):
        raise InvalidDt(f"dt {dt} outside (0, 0.5]")
    if abs(cmd.v) > state.v_max or abs(cmd.omega) > state.omega_max:
        raise CommandOutOfLimits(f"command {tuple(cmd)} exceeds limits "
                                 f"(v_max={state.v_max}, omega_max={state.omega_max})")
    if state.collided:
        state.time += dt
        return state

    half_track = state.track_width / 2.0
    v_left = cmd.v - cmd.omega * half_track
    v_right = (cmd.v + cmd.omega * half_track) * (1.0 + state.asymmetry)
    v_eff = (v_left + v_right) / 2.0
    omega_eff = (v_right - v_left) / state.track_width

    pose = state.pose
    nx = pose.x + v_eff * math.cos(pose.theta) * dt
    ny = pose.y + v_eff * math.sin(pose.theta) * dt
    ntheta = normalize_angle(pose.theta + omega_eff * dt)

    grid = state.grid
    col = math.floor((nx - grid.origin[0]) / grid.cell_size)
    row = math.floor((ny - grid.origin[1]) / grid.cell_size)
    if not (0 <= col < grid.width and 0 <= row < grid.height) \
            or grid.cells[row * grid.width + col] >= OCCUPIED_THRESHOLD:
        state.collided = True
    else:
        state.pose = Pose2D(nx, ny, ntheta)
    state.time += dt
    return state


def cast_ray(grid: OccupancyGrid, x: float, y: float, direction: float,
             max_range: float) -> float:
    """Distance to the first occupied-cell boundary along the ray.

    Exact cell walk: step whichever axis boundary comes first, checking
    each cell entered. The origin's own cell never counts as a hit; a ray
    starting outside the grid or inside an occupied cell (corrupted
    state) reports max_range.
    """
    cs = grid.cell_size
    ox, oy = grid.origin
    width, height = grid.width, grid.height
    cells = grid.cells

    col = math.floor((x - ox) / cs)
    row = math.floor((y - oy) / cs)
    if not (0 <= col < width and 0 <= row < height):
        return max_range
    if cells[row * width + col] >= OCCUPIED_THRESHOLD:
        return max_range

    dx = math.cos(direction)
    dy = math.sin(direction)

    if dx > 0:
        step_col = 1
        t_max_x = (ox + (col + 1) * cs - x) / dx
        t_delta_x = cs / dx
    elif dx < 0:
        step_col = -1
        t_max_x = (ox + col * cs - x) / dx
        t_delta_x = -cs / dx
    else:
        step_col = 0
        t_max_x = math.inf
        t_delta_x = math.inf

    if dy > 0:
        step_row = 1
        t_max_y = (oy + (row + 1) * cs - y) / dy
        t_delta_y = cs / dy
    elif dy < 0:
        step_row = -1
        t_max_y = (oy + row * cs - y) / dy
        t_delta_y = -cs / dy
    else:
        step_row = 0
        t_max_y = math.inf
        t_delta_y = math.inf

    while True:
        if t_max_x < t_max_y:
            t = t_max_x
            t_max_x += t_delta_x
            col += step_col
        else:
            t = t_max_y
            t_max_y += t_delta_y
            row += step_row
        if t >= max_range:
            return max_range
        if not (0 <= col < width and 0 <= row < height):
            return max_range
        if cells[row * width + col] >= OCCUPIED_THRESHOLD:
            return t if t > 0 else 1e-12


def scan_angles(sector: float, n_rays: int) -> tuple[float, ...]:
    """Ray angles over [-sector/2, +sector/2] relative to heading.

    A single ray points straight ahead. A full-circle sector avoids the
    duplicate -pi/+pi direction by spanning (-pi, pi].
    """
    if not (0.0 < sector <= TAU + 1e-12):
        raise InvalidSector(f"sector {sector} outside (0, 2*pi]")
    if n_rays < 1:
        raise InvalidRayCount(f"n_rays {n_rays} < 1")
    if n_rays == 1:
        return (0.0,)
    if abs(sector - TAU) <= 1e-12:
        # last ray exactly at +pi, never both -pi and +pi
        return tuple(-math.pi + TAU * (k / n_rays) for k in range(1, n_rays)) + (math.pi,)
    # endpoints land exactly on +-sector/2
    return tuple(sector * (k / (n_rays - 1) - 0.5) for k in range(n_rays))


def lidar_scan(state: SimState, sector: float = DEFAULT_SECTOR,
               n_rays: int = DEFAULT_N_RAYS,
               max_range: float = DEFAULT_MAX_RANGE) -> LidarScan:
    """Forward-sector scan from the current pose."""
    if max_range <= 0:
        raise ValueError("max_range must be positive")
    angles = scan_angles(sector, n_rays)
    pose = state.pose
    ranges = tuple(
        cast_ray(state.grid, pose.x, pose.y, pose.theta + a, max_range)
        for a in angles)
    return LidarScan(angles, ranges, max_range)


ControllerFn = Callable[[Pose2D, LidarScan], "Command | None"]


def run_episode(state: SimState, controller_fn: ControllerFn,
                dt: float = DEFAULT_DT, max_steps: int = 10000,
                sector: float = DEFAULT_SECTOR, n_rays: int = DEFAULT_N_RAYS,
                max_range: float = DEFAULT_MAX_RANGE) -> list[tuple[float, Pose2D, Command]]:
    """Drive the controller in closed loop until done, collision, or max_steps.

    Returns one (time, pose, command) record per executed step, with
    time/pose sampled when the controller was queried. The controller
    signals done by returning None.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    trace = []
    for _ in range(max_steps):
        scan = lidar_scan(state, sector, n_rays, max_range)
        cmd = controller_fn(state.pose, scan)
        if cmd is None:
            break
        trace.append((state.time, state.pose, cmd))
        step(state, cmd, dt)
        if state.collided:
            break
    return trace


def write_trace(records: list[tuple[float, Pose2D, Command]]) -> bytes:
    """Line-delimited trace: {"t":..,"pose":[x,y,theta],"cmd":[v,omega]}."""
    lines = []
    for t, pose, cmd in records:
        lines.append(json.dumps(
            {"t": t, "pose": [pose.x, pose.y, pose.theta], "cmd": [cmd.v, cmd.omega]},
            separators=(",", ":")))
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def read_trace(data: bytes) -> list[tuple[float, Pose2D, Command]]:
    records = []
    for line in data.decode("utf-8").splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        pose = raw["pose"]
        cmd = raw.get("cmd", [0.0, 0.0])
        records.append((float(raw["t"]),
                        Pose2D(float(pose[0]), float(pose[1]), float(pose[2])),
                        Command(float(cmd[0]), float(cmd[1]))))
    return records
