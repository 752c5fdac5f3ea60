"""Run configuration: defaults, key=value config files, flag overrides.

Precedence is defaults < config file < command-line flags, so an
experiment is reproducible from its config file plus the recorded
command line.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from . import controller, grid, planner, sim


@dataclass
class RunConfig:
    # grid construction
    cell_size: float = grid.DEFAULT_CELL_SIZE
    padding: int = grid.DEFAULT_PADDING
    # planning
    connectivity: int = planner.FOUR_CONNECTED
    snap: bool = False
    # controller
    lookahead: float = 0.75
    goal_tolerance: float = 0.25
    stop_distance: float = 0.5
    turn_gain: float = 1.5
    cruise_speed: float = 0.5
    clip_range: float = 8.0
    # lidar
    sector: float = sim.DEFAULT_SECTOR
    n_rays: int = sim.DEFAULT_N_RAYS
    max_range: float = sim.DEFAULT_MAX_RANGE
    # simulation
    dt: float = sim.DEFAULT_DT
    asymmetry: float = 0.0
    track_width: float = sim.DEFAULT_TRACK_WIDTH
    v_max: float = sim.DEFAULT_V_MAX
    omega_max: float = sim.DEFAULT_OMEGA_MAX
    max_steps: int = 20000
    # server
    host: str = "127.0.0.1"
    port: int = 8080
    position_rate_hz: float = 10.0
    speed: float = 1.0  # real-time multiplier for serve sim/replay pacing
    # reproducibility
    seed: int = 0

    def controller_params(self) -> controller.ControllerParams:
        return controller.ControllerParams(
            lookahead=self.lookahead,
            goal_tolerance=self.goal_tolerance,
            stop_distance=self.stop_distance,
            turn_gain=self.turn_gain,
            cruise_speed=self.cruise_speed,
            clip_range=self.clip_range,
            omega_max=self.omega_max,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def parse_config_file(text: str) -> dict:
    """Parse key=value lines ('#' comments, blank lines ignored)."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def apply_overrides(config: RunConfig, values: dict) -> RunConfig:
    for key, value in values.items():
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        setattr(config, key, value)
    return config


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if kind in ("bool", bool):
        lowered = raw.lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"config key {key!r}: expected a boolean, got {raw!r}")
    if kind in ("int", int):
        return int(raw)
    if kind in ("float", float):
        return float(raw)
    return raw
