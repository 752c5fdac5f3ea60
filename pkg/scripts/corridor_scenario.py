#!/usr/bin/env python3
"""L-corridor closed-loop experiment.

Builds the synthetic keyframe trail, runs the full pipeline (ingest ->
grid -> plan), then sweeps seeds through the simulator and reports the
REACHED rate with and without the motor-asymmetry drift. Artifacts
(map, grid, path, one sample trace, PGM preview) land in --out-dir.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from navstack.cli import simulate_episode
from navstack.config import RunConfig
from navstack.grid import build_grid, encode_grid, export_pgm, world_to_cell
from navstack.mapdb import parse_map_file, project_points
from navstack.planner import plan
from navstack.protocol import PathMessage, encode_message
from navstack.scenarios import l_corridor_endpoints, l_corridor_map_bytes
from navstack.sim import write_trace


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=50)
    parser.add_argument("--asymmetry", type=float, default=0.1)
    parser.add_argument("--out-dir", default="corridor_out")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    map_bytes = l_corridor_map_bytes()
    (out / "corridor.msg").write_bytes(map_bytes)
    db = parse_map_file(map_bytes)
    grid = build_grid(project_points(db), cell_size=0.25, padding=2)
    (out / "corridor.grid.json").write_bytes(encode_grid(grid))
    (out / "corridor.pgm").write_bytes(export_pgm(grid))

    start_w, goal_w = l_corridor_endpoints()
    path = plan(grid, world_to_cell(grid, start_w), world_to_cell(grid, goal_w))
    (out / "corridor.path.json").write_bytes(
        encode_message(PathMessage(path.cells, path.cost)).encode() + b"\n")
    print(f"grid {grid.width}x{grid.height}, path {len(path.cells)} cells, "
          f"cost {path.cost}")

    for asym in (args.asymmetry, 0.0):
        t0 = time.perf_counter()
        verdicts = []
        for seed in range(args.runs):
            cfg = RunConfig(asymmetry=asym, seed=seed)
            verdict, trace, _state = simulate_episode(grid, path, cfg)
            verdicts.append(verdict)
            if seed == 0 and asym == args.asymmetry:
                (out / "sample_trace.jsonl").write_bytes(write_trace(trace))
        reached = verdicts.count("REACHED")
        print(f"asymmetry={asym}: {reached}/{args.runs} REACHED "
              f"({time.perf_counter() - t0:.1f}s)")
        for verdict in set(verdicts):
            if verdict != "REACHED":
                print(f"  {verdicts.count(verdict)}x {verdict}")
    print(f"artifacts in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
