"""NavMap v1 map-database parsing and keyframe pose math.

A map database stores the keyframe trajectory exported by a visual-SLAM
run: per keyframe a camera-from-world rotation (unit quaternion, wxyz)
and translation. The camera's world position is recovered as
``c = -R^T t`` and projected onto a ground plane for grid construction.

Two encodings of the same structure are accepted: MessagePack binary
and its JSON text equivalent, auto-detected by the leading byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import (
    BadQuaternion,
    EmptyMap,
    MalformedFile,
    MissingField,
    UnsupportedVersion,
)
from .msgpack_codec import MsgpackError, packb, unpackb

QUAT_NORM_TOLERANCE = 1e-3

AXES = ("x", "y", "z")
_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class Keyframe:
    """One stored camera pose, camera-from-world convention."""

    id: int
    rot_cw: tuple[float, float, float, float]  # unit quaternion, (w, x, y, z)
    trans_cw: tuple[float, float, float]       # meters
    timestamp: float | None = None


@dataclass(frozen=True)
class Landmark:
    """A triangulated 3D world point (wall/object feature)."""

    id: int
    pos_w: tuple[float, float, float]


@dataclass(frozen=True)
class MapDatabase:
    """Parsed map: keyframes sorted by ascending id, optional landmarks."""

    version: int
    keyframes: tuple[Keyframe, ...]
    landmarks: tuple[Landmark, ...] = ()


@dataclass(frozen=True)
class PlaneProjection:
    """Which two world axes form the 2D ground plane.

    For a forward-facing camera with gravity along y, the floor plane is
    x-z, which is the default used throughout the stack.
    """

    horizontal_axis: str = "x"
    vertical_axis: str = "z"

    def __post_init__(self) -> None:
        if self.horizontal_axis not in AXES or self.vertical_axis not in AXES:
            raise ValueError(f"axes must be one of {AXES}")
        if self.horizontal_axis == self.vertical_axis:
            raise ValueError("projection axes must be distinct")


DEFAULT_PROJECTION = PlaneProjection()


def parse_map_file(data: bytes) -> MapDatabase:
    """Parse NavMap v1 bytes (MessagePack or JSON, auto-detected).

    Quaternions are normalized; a norm off 1 by more than 1e-3 is
    rejected as BadQuaternion.
    """
    raw = _decode_container(data)
    if not isinstance(raw, dict):
        raise MalformedFile("top-level value is not a map")

    if "version" not in raw:
        raise MissingField("missing top-level 'version'")
    version = raw["version"]
    if not isinstance(version, int) or isinstance(version, bool):
        raise MalformedFile("'version' is not an integer")
    if version != 1:
        raise UnsupportedVersion(f"unsupported map version {version}")

    if "keyframes" not in raw:
        raise MissingField("missing top-level 'keyframes'")
    if not isinstance(raw["keyframes"], dict):
        raise MalformedFile("'keyframes' is not a map")

    keyframes = []
    for key, entry in raw["keyframes"].items():
        kf_id = _parse_id(key, "keyframe")
        if not isinstance(entry, dict):
            raise MalformedFile(f"keyframe {key!r} is not a map")
        if "rot_cw" not in entry:
            raise MissingField(f"keyframe {key!r} lacks 'rot_cw'")
        if "trans_cw" not in entry:
            raise MissingField(f"keyframe {key!r} lacks 'trans_cw'")
        rot = _float_vector(entry["rot_cw"], 4, f"keyframe {key!r} rot_cw")
        trans = _float_vector(entry["trans_cw"], 3, f"keyframe {key!r} trans_cw")
        ts = entry.get("ts")
        if ts is not None:
            ts = _finite_float(ts, f"keyframe {key!r} ts")
        keyframes.append(Keyframe(kf_id, _normalize_quat(rot, key), trans, ts))
    _check_unique([kf.id for kf in keyframes], "keyframe")
    keyframes.sort(key=lambda kf: kf.id)

    landmarks = []
    raw_landmarks = raw.get("landmarks")
    if raw_landmarks is not None:
        if not isinstance(raw_landmarks, dict):
            raise MalformedFile("'landmarks' is not a map")
        for key, entry in raw_landmarks.items():
            lm_id = _parse_id(key, "landmark")
            if not isinstance(entry, dict) or "pos_w" not in entry:
                raise MissingField(f"landmark {key!r} lacks 'pos_w'")
            pos = _float_vector(entry["pos_w"], 3, f"landmark {key!r} pos_w")
            landmarks.append(Landmark(lm_id, pos))
        _check_unique([lm.id for lm in landmarks], "landmark")
        landmarks.sort(key=lambda lm: lm.id)

    return MapDatabase(1, tuple(keyframes), tuple(landmarks))


def serialize_map(db: MapDatabase, text: bool = False) -> bytes:
    """Canonical NavMap v1 bytes; re-parses to an equal MapDatabase."""
    obj: dict = {"version": db.version}
    obj["keyframes"] = {
        str(kf.id): _keyframe_entry(kf)
        for kf in sorted(db.keyframes, key=lambda kf: kf.id)
    }
    obj["landmarks"] = {
        str(lm.id): {"pos_w": list(lm.pos_w)}
        for lm in sorted(db.landmarks, key=lambda lm: lm.id)
    }
    if text:
        return json.dumps(obj, separators=(",", ":")).encode("utf-8")
    return packb(obj)


def camera_center(kf: Keyframe) -> tuple[float, float, float]:
    """World position of the camera: c = -R^T t."""
    r = _rotation_matrix(kf.rot_cw)
    tx, ty, tz = kf.trans_cw
    return (
        -(r[0][0] * tx + r[1][0] * ty + r[2][0] * tz),
        -(r[0][1] * tx + r[1][1] * ty + r[2][1] * tz),
        -(r[0][2] * tx + r[1][2] * ty + r[2][2] * tz),
    )


def rotate_point(q: tuple[float, float, float, float],
                 p: tuple[float, float, float]) -> tuple[float, float, float]:
    """Apply the rotation of unit quaternion q (wxyz) to point p."""
    r = _rotation_matrix(q)
    return (
        r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2],
        r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2],
        r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2],
    )


def project_points(db: MapDatabase,
                   proj: PlaneProjection = DEFAULT_PROJECTION) -> list[tuple[float, float]]:
    """One 2D point per keyframe, ascending id order."""
    if not db.keyframes:
        raise EmptyMap("map database has no keyframes")
    h = _AXIS_INDEX[proj.horizontal_axis]
    v = _AXIS_INDEX[proj.vertical_axis]
    points = []
    for kf in sorted(db.keyframes, key=lambda kf: kf.id):
        c = camera_center(kf)
        points.append((c[h], c[v]))
    return points


def _decode_container(data: bytes):
    stripped = data.lstrip()
    if stripped[:1] == b"{":
        try:
            return json.loads(stripped.decode("utf-8"),
                              object_pairs_hook=_reject_duplicate_keys)
        except (ValueError, UnicodeDecodeError) as exc:
            raise MalformedFile(f"invalid JSON map file: {exc}") from exc
    try:
        return unpackb(data)
    except MsgpackError as exc:
        raise MalformedFile(f"invalid binary map file: {exc}") from exc


def _reject_duplicate_keys(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise ValueError(f"duplicate key {key!r}")
        obj[key] = value
    return obj


def _keyframe_entry(kf: Keyframe) -> dict:
    entry: dict = {"rot_cw": list(kf.rot_cw), "trans_cw": list(kf.trans_cw)}
    if kf.timestamp is not None:
        entry["ts"] = kf.timestamp
    return entry


def _parse_id(key, kind: str) -> int:
    if isinstance(key, int) and not isinstance(key, bool) and key >= 0:
        return key
    if isinstance(key, str):
        try:
            value = int(key, 10)
        except ValueError:
            value = -1
        if value >= 0:
            return value
    raise MalformedFile(f"{kind} id {key!r} is not a non-negative integer")


def _check_unique(ids: list[int], kind: str) -> None:
    if len(set(ids)) != len(ids):
        raise MalformedFile(f"duplicate {kind} ids")


def _finite_float(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedFile(f"{what} is not a number")
    value = float(value)
    if not math.isfinite(value):
        raise MalformedFile(f"{what} is not finite")
    return value


def _float_vector(value, n: int, what: str) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise MalformedFile(f"{what} is not a {n}-vector")
    return tuple(_finite_float(v, what) for v in value)


def _normalize_quat(q: tuple, key) -> tuple[float, float, float, float]:
    norm = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if abs(norm - 1.0) > QUAT_NORM_TOLERANCE:
        raise BadQuaternion(
            f"keyframe {key!r} quaternion norm {norm:.6g} outside tolerance")
    if abs(norm - 1.0) < 1e-12:
        # already unit within float noise; dividing would break the
        # parse -> serialize -> parse fixpoint by an ulp
        return (q[0], q[1], q[2], q[3])
    return (q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm)


def _rotation_matrix(q: tuple[float, float, float, float]):
    w, x, y, z = q
    return (
        (1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)),
    )
