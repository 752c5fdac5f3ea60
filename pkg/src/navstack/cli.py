"""navctl: operator entry point wiring the pipeline.

    navctl ingest <map> [--cell-size M] [--padding N] [-o grid.file] [--pgm img.pgm]
    navctl plan <grid> --start C,R --goal C,R [--connectivity 4|8] [--snap] [-o path.file]
    navctl simulate <grid> <path> [--seed N] [--asymmetry A] [--trace out.file]
    navctl serve <grid> [--host H] [--port P] [--mode plan|sim|replay] [--replay trace.file]

Exit codes: 0 success, 1 domain error, 2 usage error. Logging goes to
stderr; level from NAVCTL_LOG (error|warn|info|debug, default info).
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import math
import os
import random
import sys
from pathlib import Path

from . import mapdb, planner, sim
from .config import RunConfig, apply_overrides, parse_config_file
from .controller import make_follower
from .errors import NavError
from .grid import (
    GridIndex,
    OccupancyGrid,
    build_grid,
    cell_to_world,
    decode_grid,
    encode_grid,
    export_pgm,
    free_cell_count,
    world_to_cell,
)
from .planner import GridPath, snap_to_free
from .protocol import PathMessage, decode_message, encode_message
from .server import NavServer

REACHED = "REACHED"
COLLIDED = "COLLIDED"
TIMEOUT = "TIMEOUT"


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return args.func(args, cfg)
    except NavError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


# -- commands ----------------------------------------------------------------

def cmd_ingest(args, cfg: RunConfig) -> int:
    data = Path(args.map_file).read_bytes()
    db = mapdb.parse_map_file(data)
    points = mapdb.project_points(db)
    grid = build_grid(points, cfg.cell_size, cfg.padding)

    out = Path(args.output) if args.output else Path(args.map_file).with_suffix(".grid.json")
    out.write_bytes(encode_grid(grid))
    if args.pgm:
        Path(args.pgm).write_bytes(export_pgm(grid))
    print(f"grid {grid.width}x{grid.height} cell_size={grid.cell_size} "
          f"origin=({grid.origin[0]}, {grid.origin[1]}) "
          f"free={free_cell_count(grid)}/{grid.width * grid.height}")
    print(f"wrote {out}")
    return 0


def cmd_plan(args, cfg: RunConfig) -> int:
    grid = decode_grid(Path(args.grid_file).read_bytes())
    start = args.start
    goal = args.goal
    if cfg.snap:
        start = snap_to_free(grid, start)
        goal = snap_to_free(grid, goal)
    path = planner.plan(grid, start, goal, cfg.connectivity)

    out = Path(args.output) if args.output else Path(args.grid_file).with_suffix(".path.json")
    out.write_bytes(encode_message(PathMessage(path.cells, path.cost)).encode("utf-8") + b"\n")
    print(f"path {len(path.cells)} cells cost={path.cost}")
    print(f"wrote {out}")
    return 0


def cmd_simulate(args, cfg: RunConfig) -> int:
    grid = decode_grid(Path(args.grid_file).read_bytes())
    path = _read_path_file(Path(args.path_file).read_bytes())
    verdict, trace, state = simulate_episode(grid, path, cfg)
    if args.trace:
        Path(args.trace).write_bytes(sim.write_trace(trace))
    print(f"{verdict} steps={len(trace)} time={state.time:.2f}s "
          f"final=({state.pose.x:.3f}, {state.pose.y:.3f})")
    return 0 if verdict == REACHED else 1


def cmd_serve(args, cfg: RunConfig) -> int:
    grid = decode_grid(Path(args.grid_file).read_bytes())
    mode = args.mode
    sim_state = None
    replay_trace = None
    if mode == "sim":
        sim_state = sim.create_world(grid, _default_start_pose(grid),
                                     asymmetry=cfg.asymmetry,
                                     track_width=cfg.track_width,
                                     v_max=cfg.v_max, omega_max=cfg.omega_max)
    elif mode == "replay":
        if not args.replay:
            print("error: --mode replay needs --replay trace.file", file=sys.stderr)
            return 2
        replay_trace = sim.read_trace(Path(args.replay).read_bytes())

    server = NavServer(grid, mode=mode, snap=cfg.snap, connectivity=cfg.connectivity,
                       sim_state=sim_state, controller_params=cfg.controller_params(),
                       replay_trace=replay_trace, dt=cfg.dt,
                       position_rate_hz=cfg.position_rate_hz, speed=cfg.speed,
                       sector=cfg.sector, n_rays=cfg.n_rays, max_range=cfg.max_range)
    try:
        asyncio.run(_serve_until_interrupt(server, cfg.host, cfg.port))
    except KeyboardInterrupt:
        pass
    return 0


async def _serve_until_interrupt(server: NavServer, host: str, port: int) -> None:
    bound = await server.start(host, port)
    print(f"serving ws://{host}:{bound} (mode={server.mode})", flush=True)
    try:
        await server.serve_forever()
    except asyncio.CancelledError:
        pass
    finally:
        await server.stop()


# -- reusable pipeline pieces -------------------------------------------------

def simulate_episode(grid: OccupancyGrid, path: GridPath,
                     cfg: RunConfig) -> tuple[str, list, sim.SimState]:
    """Follow `path` from a seed-jittered start; returns (verdict, trace, state).

    The seed perturbs the start position inside the first path cell and
    the initial heading, giving repeatable run-to-run variation.
    """
    state = sim.create_world(grid, start_pose(grid, path, cfg.seed),
                             asymmetry=cfg.asymmetry, track_width=cfg.track_width,
                             v_max=cfg.v_max, omega_max=cfg.omega_max)
    follower = make_follower(path, grid, cfg.controller_params())
    trace = sim.run_episode(state, follower, dt=cfg.dt, max_steps=cfg.max_steps,
                            sector=cfg.sector, n_rays=cfg.n_rays,
                            max_range=cfg.max_range)
    if state.collided:
        verdict = COLLIDED
    elif len(trace) < cfg.max_steps:
        verdict = REACHED
    else:
        verdict = TIMEOUT
    return verdict, trace, state


def start_pose(grid: OccupancyGrid, path: GridPath, seed: int) -> sim.Pose2D:
    """Start at the first path cell, jittered deterministically by seed."""
    rng = random.Random(seed)
    cx, cy = cell_to_world(grid, path.cells[0])
    x = cx + rng.uniform(-0.3, 0.3) * grid.cell_size
    y = cy + rng.uniform(-0.3, 0.3) * grid.cell_size
    if len(path.cells) > 1:
        nx, ny = cell_to_world(grid, path.cells[1])
        heading = math.atan2(ny - cy, nx - cx)
    else:
        heading = 0.0
    heading += rng.uniform(-math.pi / 8, math.pi / 8)
    return sim.Pose2D(x, y, sim.normalize_angle(heading))


def _default_start_pose(grid: OccupancyGrid) -> sim.Pose2D:
    center = (grid.origin[0] + grid.width * grid.cell_size / 2,
              grid.origin[1] + grid.height * grid.cell_size / 2)
    cell = snap_to_free(grid, world_to_cell(grid, center))
    x, y = cell_to_world(grid, cell)
    return sim.Pose2D(x, y, 0.0)


def _read_path_file(data: bytes) -> GridPath:
    msg = decode_message(data.decode("utf-8").strip())
    if not isinstance(msg, PathMessage):
        raise ValueError("path file does not contain a path body")
    return GridPath(msg.cells, msg.cost)


# -- plumbing ------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="navctl",
                                     description="SLAM-map navigation pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="map database -> occupancy grid")
    p.add_argument("map_file")
    p.add_argument("--cell-size", type=float, dest="cell_size")
    p.add_argument("--padding", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--pgm")
    _common_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("plan", help="A* path between grid cells")
    p.add_argument("grid_file")
    p.add_argument("--start", required=True, metavar="C,R", type=_parse_cell)
    p.add_argument("--goal", required=True, metavar="C,R", type=_parse_cell)
    p.add_argument("--connectivity", type=int, choices=(4, 8))
    p.add_argument("--snap", action="store_const", const=True, default=None)
    p.add_argument("-o", "--output")
    _common_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="closed-loop path following")
    p.add_argument("grid_file")
    p.add_argument("path_file")
    p.add_argument("--seed", type=int)
    p.add_argument("--asymmetry", type=float)
    p.add_argument("--max-steps", type=int, dest="max_steps")
    p.add_argument("--trace")
    _common_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="WebSocket goal/path/position server")
    p.add_argument("grid_file")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--mode", choices=("plan", "sim", "replay"), default="plan")
    p.add_argument("--replay", help="trace file for --mode replay")
    p.add_argument("--speed", type=float, help="real-time multiplier for sim/replay")
    p.add_argument("--snap", action="store_const", const=True, default=None)
    _common_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file")


_FLAG_KEYS = ("cell_size", "padding", "connectivity", "snap", "seed",
              "asymmetry", "max_steps", "host", "port", "speed")


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        apply_overrides(cfg, parse_config_file(Path(args.config).read_text()))
    flag_values = {key: getattr(args, key) for key in _FLAG_KEYS
                   if getattr(args, key, None) is not None}
    apply_overrides(cfg, flag_values)
    return cfg


def _parse_cell(text: str) -> GridIndex:
    try:
        col, row = text.split(",")
        return GridIndex(int(col), int(row))
    except ValueError:
        # argparse turns this into a usage error (exit 2)
        raise argparse.ArgumentTypeError(f"expected cell as C,R, got {text!r}")


def _setup_logging() -> None:
    levels = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    name = os.environ.get("NAVCTL_LOG", "info").lower()
    logging.basicConfig(stream=sys.stderr,
                        level=levels.get(name, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


if __name__ == "__main__":
    sys.exit(main())
