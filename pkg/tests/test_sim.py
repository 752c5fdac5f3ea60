import math
import random

import pytest

from navstack.errors import (
    CommandOutOfLimits,
    InvalidDt,
    InvalidRayCount,
    InvalidSector,
    OutOfBounds,
    StartInObstacle,
)
from navstack.grid import OccupancyGrid
from navstack.sim import (
    Command,
    Pose2D,
    cast_ray,
    create_world,
    lidar_scan,
    normalize_angle,
    read_trace,
    run_episode,
    scan_angles,
    step,
    write_trace,
)
from conftest import make_grid


def open_arena(size_m: float = 20.0, cell: float = 1.0) -> OccupancyGrid:
    n = int(size_m / cell)
    return OccupancyGrid(n, n, cell, (0.0, 0.0), (0.0,) * (n * n))


def walled_arena() -> OccupancyGrid:
    """20x20 m free space with a full-height wall at x in [12, 13]."""
    cells = [0.0] * 400
    for row in range(20):
        cells[row * 20 + 12] = 1.0
    return OccupancyGrid(20, 20, 1.0, (0.0, 0.0), tuple(cells))


def dense_range(grid, x, y, direction, max_range, step_len=0.001):
    """1 mm sampling oracle, independent of the DDA walk."""
    ox, oy = grid.origin
    cs = grid.cell_size
    own = (math.floor((x - ox) / cs), math.floor((y - oy) / cs))
    dx, dy = math.cos(direction), math.sin(direction)
    n = int(max_range / step_len)
    for i in range(1, n + 1):
        t = i * step_len
        col = math.floor((x + dx * t - ox) / cs)
        row = math.floor((y + dy * t - oy) / cs)
        if not (0 <= col < grid.width and 0 <= row < grid.height):
            return max_range
        if (col, row) != own and grid.cells[row * grid.width + col] >= 0.5:
            return t
    return max_range


class TestNormalizeAngle:
    def test_in_range_unchanged(self):
        for theta in (0.0, 1.0, -3.1, math.pi, -math.pi + 1e-9):
            assert normalize_angle(theta) == theta

    def test_wrapping(self):
        assert normalize_angle(math.pi + 0.5) == pytest.approx(-math.pi + 0.5)
        assert normalize_angle(-math.pi) == math.pi
        assert normalize_angle(2 * math.pi) == pytest.approx(0.0, abs=1e-12)
        assert normalize_angle(7 * math.pi) == pytest.approx(math.pi)


class TestCreateWorld:
    def test_free_cell_ok(self):
        state = create_world(open_arena(), Pose2D(5.5, 5.5, 0.0))
        assert state.collided is False
        assert state.time == 0.0

    def test_occupied_start_rejected(self):
        with pytest.raises(StartInObstacle):
            create_world(walled_arena(), Pose2D(12.5, 5.0, 0.0))

    def test_outside_grid_rejected(self):
        with pytest.raises(OutOfBounds):
            create_world(open_arena(), Pose2D(-3.0, 5.0, 0.0))


class TestStep:
    def test_zero_command_freezes_pose(self):
        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.7))
        step(state, Command(0.0, 0.0), 0.25)
        assert state.pose == Pose2D(5.0, 5.0, 0.7)
        assert state.collided is False
        assert state.time == 0.25

    def test_forward_euler(self):
        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.0))
        step(state, Command(1.0, 0.0), 0.1)
        assert state.pose == Pose2D(5.1, 5.0, 0.0)

    def test_asymmetry_worked_example(self):
        # v=1, a=0.1, L=0.5: v_r=1.1 -> v'=1.05, omega'=0.2
        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.0),
                             asymmetry=0.1, track_width=0.5)
        step(state, Command(1.0, 0.0), 0.1)
        assert state.pose.x == pytest.approx(5.105, abs=1e-12)
        assert state.pose.y == pytest.approx(5.0, abs=1e-12)
        assert state.pose.theta == pytest.approx(0.02, abs=1e-12)

    def test_asymmetry_speeds_up_right_wheel_turning_left(self):
        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.0), asymmetry=0.3)
        for _ in range(40):
            step(state, Command(0.5, 0.0), 0.05)
        assert state.pose.theta > 0  # drifts counterclockwise
        assert state.pose.y > 5.0

    def test_invalid_dt(self):
        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.0))
        for dt in (0.0, -0.1, 0.51):
            with pytest.raises(InvalidDt):
                step(state, Command(0.0, 0.0), dt)

    def test_command_limits(self):
        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.0),
                             v_max=1.0, omega_max=2.0)
        with pytest.raises(CommandOutOfLimits):
            step(state, Command(1.1, 0.0), 0.1)
        with pytest.raises(CommandOutOfLimits):
            step(state, Command(0.0, -2.1), 0.1)
        step(state, Command(1.0, 2.0), 0.1)  # at the limits is fine

    def test_collision_reverts_and_latches(self):
        state = create_world(walled_arena(), Pose2D(11.5, 5.0, 0.0), v_max=2.0)
        step(state, Command(2.0, 0.0), 0.5)  # would enter the wall cell
        assert state.collided is True
        assert state.pose == Pose2D(11.5, 5.0, 0.0)
        frozen = state.pose
        for cmd in (Command(1.0, 0.0), Command(-1.0, 1.0), Command(0.0, 2.0)):
            step(state, cmd, 0.1)
            assert state.pose == frozen
        assert state.time == pytest.approx(0.8)

    def test_out_of_bounds_is_collision(self):
        state = create_world(open_arena(), Pose2D(0.5, 0.5, math.pi))
        for _ in range(5):
            step(state, Command(1.0, 0.0), 0.3)
        assert state.collided is True
        assert 0 <= state.pose.x


class TestScanAngles:
    def test_single_ray_straight_ahead(self):
        assert scan_angles(1.0, 1) == (0.0,)

    def test_forward_sector_endpoints_exact(self):
        angles = scan_angles(math.pi / 2, 3)
        assert angles == (-math.pi / 4, 0.0, math.pi / 4)

    def test_full_circle_spans_open_closed_interval(self):
        angles = scan_angles(2 * math.pi, 360)
        assert len(angles) == 360
        assert angles[0] > -math.pi
        assert angles[-1] == math.pi
        assert all(a < b for a, b in zip(angles, angles[1:]))
        assert angles[-1] - angles[0] <= 2 * math.pi

    def test_invalid_inputs(self):
        with pytest.raises(InvalidSector):
            scan_angles(0.0, 3)
        with pytest.raises(InvalidSector):
            scan_angles(2 * math.pi + 0.1, 3)
        with pytest.raises(InvalidRayCount):
            scan_angles(1.0, 0)


class TestLidar:
    def test_empty_arena_caps_at_max_range(self):
        state = create_world(open_arena(), Pose2D(10.0, 10.0, 0.3))
        scan = lidar_scan(state, max_range=8.0)
        assert len(scan.ranges) == 90
        assert all(r == 8.0 for r in scan.ranges)

    def test_perpendicular_wall_fixture(self):
        state = create_world(walled_arena(), Pose2D(10.0, 10.3, 0.0))
        scan = lidar_scan(state, sector=math.pi / 2, n_rays=3, max_range=8.0)
        assert scan.ranges[1] == pytest.approx(2.0, abs=1e-9)
        expected_diag = 2.0 / math.cos(math.pi / 4)
        assert scan.ranges[0] == pytest.approx(expected_diag, abs=1e-9)
        assert scan.ranges[2] == pytest.approx(expected_diag, abs=1e-9)
        assert expected_diag == pytest.approx(2.8284, abs=1e-4)
        for angle, rng_val in zip(scan.angles, scan.ranges):
            dense = dense_range(walled_arena(), 10.0, 10.3, angle, 8.0)
            assert abs(rng_val - dense) <= 1e-3

    def test_own_occupied_cell_returns_max_range(self):
        grid = walled_arena()
        state = create_world(grid, Pose2D(5.0, 5.0, 0.0))
        # corrupt the pose into the wall; scans must not report zero
        state.pose = Pose2D(12.5, 5.0, 0.0)
        scan = lidar_scan(state, n_rays=5)
        assert all(r == scan.max_range for r in scan.ranges)

    def test_ranges_positive_and_capped(self):
        rng = random.Random(3)
        grid = walled_arena()
        for _ in range(50):
            x = rng.uniform(0.2, 11.8)
            y = rng.uniform(0.2, 19.8)
            state = create_world(grid, Pose2D(x, y, rng.uniform(-math.pi, math.pi)))
            scan = lidar_scan(state, sector=2 * math.pi, n_rays=24, max_range=8.0)
            assert all(0.0 < r <= 8.0 for r in scan.ranges)

    def test_matches_dense_sampling_oracle(self):
        rng = random.Random(2024)
        checked = 0
        while checked < 300:
            width = rng.randrange(6, 22)
            height = rng.randrange(6, 22)
            cs = rng.choice([0.25, 0.5, 1.0])
            cells = [1.0 if rng.random() < 0.25 else 0.0
                     for _ in range(width * height)]
            grid = OccupancyGrid(width, height, cs, (0.0, 0.0), tuple(cells))
            free = [i for i, v in enumerate(cells) if v < 0.5]
            if not free:
                continue
            i = rng.choice(free)
            x = (i % width + rng.uniform(0.1, 0.9)) * cs
            y = (i // width + rng.uniform(0.1, 0.9)) * cs
            direction = rng.uniform(-math.pi, math.pi)
            got = cast_ray(grid, x, y, direction, 8.0)
            expected = dense_range(grid, x, y, direction, 8.0)
            assert abs(got - expected) <= max(1e-3, 1e-9 * got), \
                (width, height, cs, x, y, direction)
            checked += 1


class TestEpisode:
    def test_idle_controller_runs_max_steps(self):
        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.0))
        trace = run_episode(state, lambda pose, scan: Command(0.0, 0.0),
                            dt=0.1, max_steps=25)
        assert len(trace) == 25
        assert all(rec[1] == Pose2D(5.0, 5.0, 0.0) for rec in trace)

    def test_corridor_drive_until_collision(self):
        grid = make_grid([
            "#########",
            "#.......#",
            "#########",
        ])
        state = create_world(grid, Pose2D(1.5, 1.5, 0.0), v_max=1.0)
        trace = run_episode(state, lambda pose, scan: Command(1.0, 0.0),
                            dt=0.25, max_steps=200)
        assert state.collided is True
        xs = [rec[1].x for rec in trace]
        assert xs == sorted(xs)
        assert len(set(xs)) == len(xs)  # strictly increasing until the wall

    def test_heading_constant_without_asymmetry(self):
        state = create_world(open_arena(), Pose2D(2.0, 2.0, 0.35))
        for _ in range(100):
            step(state, Command(0.15, 0.0), 0.05)
        assert state.pose.theta == 0.35

    def test_deterministic_bit_identical_trace(self):
        def controller(pose, scan):
            return Command(0.4, 0.3 * math.sin(pose.x))

        traces = []
        for _ in range(2):
            state = create_world(open_arena(), Pose2D(4.0, 4.0, 0.1))
            traces.append(run_episode(state, controller, dt=0.05, max_steps=300))
        assert traces[0] == traces[1]
        assert write_trace(traces[0]) == write_trace(traces[1])

    def test_done_signal_stops_episode(self):
        calls = []

        def controller(pose, scan):
            calls.append(pose)
            return None if len(calls) >= 3 else Command(0.1, 0.0)

        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.0))
        trace = run_episode(state, controller, max_steps=50)
        assert len(trace) == 2
        assert len(calls) == 3

    def test_trace_round_trip(self):
        state = create_world(open_arena(), Pose2D(5.0, 5.0, 0.0))
        trace = run_episode(state, lambda p, s: Command(0.5, 0.1),
                            dt=0.05, max_steps=20)
        assert read_trace(write_trace(trace)) == trace
        assert write_trace([]) == b""
