"""WebSocket session server: serve the grid, plan goals, stream positions.

Clients request the map, pick a goal cell, and receive the planned path;
while the vehicle moves (simulated or replayed from a trace) every
connected session receives position frames. Each session's inbox is
processed serially so replies keep request order; the grid is immutable
and shared; a single drive task owns the vehicle state.
"""

from __future__ import annotations

import asyncio
import itertools
import logging
from dataclasses import dataclass, field

from websockets.asyncio.server import ServerConnection, serve
from websockets.exceptions import ConnectionClosed

from .controller import ControllerParams, make_follower
from .errors import (
    BadMessage,
    GoalOccupied,
    NoPath,
    OutOfBounds,
    StartOccupied,
)
from .grid import GridIndex, OCCUPIED_THRESHOLD, OccupancyGrid, world_to_cell
from .planner import GridPath, plan, snap_to_free
from .protocol import (
    ErrorMessage,
    GetMap,
    MapMessage,
    PathMessage,
    PositionMessage,
    ProtocolMessage,
    SetGoal,
    SetStart,
    decode_message,
    encode_message,
)
from .sim import (
    DEFAULT_MAX_RANGE,
    DEFAULT_N_RAYS,
    DEFAULT_SECTOR,
    Command,
    Pose2D,
    SimState,
    lidar_scan,
    step,
)

log = logging.getLogger("navstack.server")

PLAN_MODE = "plan"
SIM_MODE = "sim"
REPLAY_MODE = "replay"


@dataclass
class Session:
    id: int
    start: GridIndex | None = None   # explicit SetStart, else vehicle/default
    goal: GridIndex | None = None
    path: GridPath | None = None


@dataclass
class _Client:
    session: Session
    connection: ServerConnection
    send_lock: asyncio.Lock = field(default_factory=asyncio.Lock)


class NavServer:
    """One grid, many sessions, at most one moving vehicle."""

    def __init__(self, grid: OccupancyGrid, mode: str = PLAN_MODE,
                 snap: bool = False, connectivity: int = 4,
                 sim_state: SimState | None = None,
                 controller_params: ControllerParams | None = None,
                 replay_trace: list[tuple[float, Pose2D, Command]] | None = None,
                 dt: float = 0.05, position_rate_hz: float = 10.0,
                 speed: float = 1.0,
                 sector: float = DEFAULT_SECTOR, n_rays: int = DEFAULT_N_RAYS,
                 max_range: float = DEFAULT_MAX_RANGE,
                 drive_max_steps: int = 200000):
        if mode not in (PLAN_MODE, SIM_MODE, REPLAY_MODE):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == SIM_MODE and sim_state is None:
            raise ValueError("sim mode needs a SimState")
        if mode == REPLAY_MODE and not replay_trace:
            raise ValueError("replay mode needs a nonempty trace")
        self.grid = grid
        self.mode = mode
        self.snap = snap
        self.connectivity = connectivity
        self.sim_state = sim_state
        self.controller_params = controller_params or ControllerParams()
        self.replay_trace = replay_trace or []
        self.dt = dt
        self.position_rate_hz = position_rate_hz
        self.speed = speed
        self.sector = sector
        self.n_rays = n_rays
        self.max_range = max_range
        self.drive_max_steps = drive_max_steps

        self._clients: dict[int, _Client] = {}
        self._session_ids = itertools.count(1)
        self._drive_task: asyncio.Task | None = None
        self._server = None

    # -- core protocol logic (transport-free, unit-testable) ---------------

    def handle_message(self, session: Session, msg: ProtocolMessage) -> list[ProtocolMessage]:
        """Replies for one inbound message; errors become Error replies."""
        if isinstance(msg, GetMap):
            return [MapMessage(self.grid)]
        if isinstance(msg, SetStart):
            try:
                session.start = self._resolve_cell(msg.cell)
            except OutOfBounds as exc:
                return [ErrorMessage("OUT_OF_BOUNDS", str(exc))]
            except GoalOccupied as exc:
                return [ErrorMessage("OCCUPIED", str(exc))]
            return []
        if isinstance(msg, SetGoal):
            return self._handle_set_goal(session, msg.cell)
        # map/path/position/error are server-to-client only
        return [ErrorMessage("BAD_MESSAGE",
                             f"{type(msg).__name__} frames are server-to-client only")]

    def _handle_set_goal(self, session: Session, cell: GridIndex) -> list[ProtocolMessage]:
        try:
            goal = self._resolve_cell(cell)
        except OutOfBounds as exc:
            return [ErrorMessage("OUT_OF_BOUNDS", str(exc))]
        except GoalOccupied as exc:
            return [ErrorMessage("OCCUPIED", str(exc))]
        start = self._start_cell(session)
        try:
            path = plan(self.grid, start, goal, self.connectivity)
        except NoPath as exc:
            return [ErrorMessage("NO_PATH", str(exc))]
        except (StartOccupied, GoalOccupied) as exc:
            return [ErrorMessage("OCCUPIED", str(exc))]
        except OutOfBounds as exc:
            return [ErrorMessage("OUT_OF_BOUNDS", str(exc))]
        session.goal = goal
        session.path = path
        return [PathMessage(path.cells, path.cost)]

    def _resolve_cell(self, cell: GridIndex) -> GridIndex:
        col, row = cell
        if not (0 <= col < self.grid.width and 0 <= row < self.grid.height):
            raise OutOfBounds(f"cell ({col}, {row}) outside grid")
        if self.grid.cells[row * self.grid.width + col] >= OCCUPIED_THRESHOLD:
            if not self.snap:
                raise GoalOccupied(f"cell ({col}, {row}) is occupied")
            return snap_to_free(self.grid, cell)
        return GridIndex(col, row)

    def _start_cell(self, session: Session) -> GridIndex:
        if self.mode == SIM_MODE:
            return world_to_cell(self.grid, (self.sim_state.pose.x, self.sim_state.pose.y))
        if self.mode == REPLAY_MODE:
            pose = self.replay_trace[0][1]
            return world_to_cell(self.grid, (pose.x, pose.y))
        if session.start is not None:
            return session.start
        return self._first_free_cell()

    def _first_free_cell(self) -> GridIndex:
        for i, value in enumerate(self.grid.cells):
            if value < OCCUPIED_THRESHOLD:
                return GridIndex(i % self.grid.width, i // self.grid.width)
        raise NoPath("grid has no free cells")

    # -- transport ----------------------------------------------------------

    async def start(self, host: str = "127.0.0.1", port: int = 0) -> int:
        """Bind and serve; returns the actual listening port."""
        self._server = await serve(self._handler, host, port)
        bound = self._server.sockets[0].getsockname()[1]
        log.info("listening on %s:%d (mode=%s)", host, bound, self.mode)
        return bound

    async def serve_forever(self) -> None:
        if self._server is None:
            raise RuntimeError("server not started")
        await self._server.serve_forever()

    async def stop(self) -> None:
        if self._drive_task is not None:
            self._drive_task.cancel()
            try:
                await self._drive_task
            except (asyncio.CancelledError, Exception):
                pass
            self._drive_task = None
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def _handler(self, connection: ServerConnection) -> None:
        client = _Client(Session(next(self._session_ids)), connection)
        self._clients[client.session.id] = client
        log.info("session %d connected", client.session.id)
        try:
            async for frame in connection:
                new_path = False
                try:
                    msg = decode_message(frame)
                except BadMessage as exc:
                    replies: list[ProtocolMessage] = [ErrorMessage("BAD_MESSAGE", str(exc))]
                else:
                    had_path = client.session.path
                    replies = self.handle_message(client.session, msg)
                    new_path = (client.session.path is not None
                                and client.session.path is not had_path)
                for reply in replies:
                    await self._send(client, encode_message(reply))
                # start driving only after the path reply is on the wire so
                # position frames never overtake it
                if new_path and self.mode in (SIM_MODE, REPLAY_MODE):
                    self._start_drive(client.session)
        except ConnectionClosed:
            pass
        finally:
            self._clients.pop(client.session.id, None)
            log.info("session %d disconnected", client.session.id)

    async def _send(self, client: _Client, frame: str) -> None:
        async with client.send_lock:
            await client.connection.send(frame)

    async def broadcast(self, msg: ProtocolMessage) -> None:
        """Send one frame to every connected session; skip dead ones."""
        frame = encode_message(msg)
        for client in list(self._clients.values()):
            try:
                await self._send(client, frame)
            except ConnectionClosed:
                continue

    async def broadcast_position(self, pose: Pose2D) -> None:
        try:
            cell = world_to_cell(self.grid, (pose.x, pose.y))
        except OutOfBounds:
            log.warning("pose (%.3f, %.3f) outside grid, not broadcast", pose.x, pose.y)
            return
        await self.broadcast(PositionMessage(cell, (pose.x, pose.y, pose.theta)))

    # -- drive loop -----------------------------------------------------------

    def _start_drive(self, session: Session) -> None:
        if self._drive_task is not None and not self._drive_task.done():
            self._drive_task.cancel()
        if self.mode == SIM_MODE:
            self._drive_task = asyncio.create_task(self._drive_sim(session.path))
        else:
            self._drive_task = asyncio.create_task(self._drive_replay())

    async def _drive_sim(self, path: GridPath) -> None:
        state = self.sim_state
        follower = make_follower(path, self.grid, self.controller_params)
        min_interval = 1.0 / self.position_rate_hz
        last_emit = float("-inf")
        for _ in range(self.drive_max_steps):
            scan = lidar_scan(state, self.sector, self.n_rays, self.max_range)
            cmd = follower(state.pose, scan)
            if cmd is None:
                break
            step(state, cmd, self.dt)
            if state.collided:
                log.warning("vehicle collided at (%.3f, %.3f)", state.pose.x, state.pose.y)
                await self.broadcast(ErrorMessage("COLLIDED", "vehicle hit an obstacle"))
                return
            if state.time - last_emit >= min_interval - 1e-9:
                last_emit = state.time
                await self.broadcast_position(state.pose)
            await self._pace(self.dt)
        else:
            log.warning("drive loop hit the %d-step cap", self.drive_max_steps)
        await self.broadcast_position(state.pose)
        log.info("drive finished at (%.3f, %.3f)", state.pose.x, state.pose.y)

    async def _drive_replay(self) -> None:
        previous_t = None
        for t, pose, _cmd in self.replay_trace:
            if previous_t is not None:
                await self._pace(t - previous_t)
            previous_t = t
            await self.broadcast_position(pose)

    async def _pace(self, interval: float) -> None:
        if self.speed <= 0:
            return
        delay = interval / self.speed
        if delay > 0.0005:
            await asyncio.sleep(delay)
        else:
            await asyncio.sleep(0)
