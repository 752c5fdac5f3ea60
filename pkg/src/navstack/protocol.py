"""Session protocol messages and their canonical JSON frames.

One complete message per UTF-8 text frame. Clients send get_map /
set_goal / set_start; the server replies with map / path / position /
error. Encoding is canonical ("type" first, remaining keys alphabetical,
shortest round-trip decimals) so frames are stable enough for
golden-transcript comparison. Decoding accepts any key order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import BadMessage, MalformedGrid
from .grid import GridIndex, OccupancyGrid, grid_body, grid_from_body

ERROR_CODES = ("OUT_OF_BOUNDS", "OCCUPIED", "NO_PATH", "BAD_MESSAGE", "COLLIDED")


@dataclass(frozen=True)
class GetMap:
    pass


@dataclass(frozen=True)
class MapMessage:
    grid: OccupancyGrid


@dataclass(frozen=True)
class SetGoal:
    cell: GridIndex


@dataclass(frozen=True)
class SetStart:
    cell: GridIndex


@dataclass(frozen=True)
class PathMessage:
    cells: tuple[GridIndex, ...]
    cost: float


@dataclass(frozen=True)
class PositionMessage:
    cell: GridIndex
    pose: tuple[float, float, float]


@dataclass(frozen=True)
class ErrorMessage:
    code: str
    message: str


ProtocolMessage = (GetMap | MapMessage | SetGoal | SetStart
                   | PathMessage | PositionMessage | ErrorMessage)


def encode_message(msg: ProtocolMessage) -> str:
    if isinstance(msg, GetMap):
        body: dict = {"type": "get_map"}
    elif isinstance(msg, MapMessage):
        body = grid_body(msg.grid)
    elif isinstance(msg, SetGoal):
        body = {"type": "set_goal", "cell": [msg.cell[0], msg.cell[1]]}
    elif isinstance(msg, SetStart):
        body = {"type": "set_start", "cell": [msg.cell[0], msg.cell[1]]}
    elif isinstance(msg, PathMessage):
        body = {"type": "path",
                "cells": [[c, r] for c, r in msg.cells],
                "cost": float(msg.cost)}
    elif isinstance(msg, PositionMessage):
        body = {"type": "position",
                "cell": [msg.cell[0], msg.cell[1]],
                "pose": [msg.pose[0], msg.pose[1], msg.pose[2]]}
    elif isinstance(msg, ErrorMessage):
        body = {"type": "error", "code": msg.code, "message": msg.message}
    else:
        raise TypeError(f"not a protocol message: {type(msg).__name__}")
    return json.dumps(body, separators=(",", ":"))


def decode_message(frame: str | bytes) -> ProtocolMessage:
    """Parse one frame; field order is irrelevant. Raises BadMessage."""
    if isinstance(frame, bytes):
        try:
            frame = frame.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise BadMessage(f"frame is not utf-8: {exc}") from exc
    try:
        raw = json.loads(frame)
    except ValueError as exc:
        raise BadMessage(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise BadMessage("frame is not a JSON object")
    tag = raw.get("type")
    if not isinstance(tag, str):
        raise BadMessage("frame lacks a 'type' tag")

    if tag == "get_map":
        return GetMap()
    if tag == "set_goal":
        return SetGoal(_cell(raw.get("cell")))
    if tag == "set_start":
        return SetStart(_cell(raw.get("cell")))
    if tag == "map":
        try:
            return MapMessage(grid_from_body(raw))
        except MalformedGrid as exc:
            raise BadMessage(f"bad map body: {exc}") from exc
    if tag == "path":
        cells = raw.get("cells")
        if not isinstance(cells, list) or not cells:
            raise BadMessage("'cells' is not a nonempty array")
        cost = raw.get("cost")
        if isinstance(cost, bool) or not isinstance(cost, (int, float)) \
                or not math.isfinite(cost) or cost < 0:
            raise BadMessage("'cost' is not a non-negative number")
        return PathMessage(tuple(_cell(c) for c in cells), float(cost))
    if tag == "position":
        pose = raw.get("pose")
        if not isinstance(pose, list) or len(pose) != 3 \
                or any(isinstance(v, bool) or not isinstance(v, (int, float))
                       or not math.isfinite(v) for v in pose):
            raise BadMessage("'pose' is not a finite 3-vector")
        return PositionMessage(_cell(raw.get("cell")),
                               (float(pose[0]), float(pose[1]), float(pose[2])))
    if tag == "error":
        code = raw.get("code")
        message = raw.get("message")
        if code not in ERROR_CODES:
            raise BadMessage(f"unknown error code {code!r}")
        if not isinstance(message, str):
            raise BadMessage("'message' is not a string")
        return ErrorMessage(code, message)

    raise BadMessage(f"unknown message type {tag!r}")


def _cell(value) -> GridIndex:
    if not isinstance(value, list) or len(value) != 2 \
            or any(isinstance(v, bool) or not isinstance(v, int) for v in value):
        raise BadMessage("'cell' is not a 2-integer array")
    return GridIndex(value[0], value[1])
