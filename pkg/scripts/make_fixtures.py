#!/usr/bin/env python3
"""Regenerate the golden fixtures under tests/golden/.

Everything here is written independently of the package (bytes are
assembled by hand with struct) so the fixtures stay a cross-check on the
production encoders rather than a mirror of them.
"""

from __future__ import annotations

import struct
import sys
from pathlib import Path

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


# -- independent MessagePack writer (subset used by the map schema) ----------

def mp_str(s: str) -> bytes:
    data = s.encode("utf-8")
    assert len(data) < 32
    return bytes([0xA0 | len(data)]) + data


def mp_f64_array(values) -> bytes:
    assert len(values) < 16
    out = bytes([0x90 | len(values)])
    for v in values:
        out += b"\xcb" + struct.pack(">d", float(v))
    return out


def mp_map(pairs: list[tuple[bytes, bytes]]) -> bytes:
    assert len(pairs) < 16
    out = bytes([0x80 | len(pairs)])
    for key, value in pairs:
        out += key + value
    return out


def mp_int(value: int) -> bytes:
    assert 0 <= value < 0x80
    return bytes([value])


def keyframe_entry(trans, ts=None) -> bytes:
    pairs = [
        (mp_str("rot_cw"), mp_f64_array([1.0, 0.0, 0.0, 0.0])),
        (mp_str("trans_cw"), mp_f64_array(trans)),
    ]
    if ts is not None:
        pairs.append((mp_str("ts"), b"\xcb" + struct.pack(">d", ts)))
    return mp_map(pairs)


def write_navmap5() -> None:
    # Camera centers whose (x, z) projections carve cells (1,1) and (3,1)
    # out of a 5x3 grid at cell_size 1.0 with 1 cell of padding.
    centers = [
        (0.5, 1.5, 0.5),
        (2.5, 1.5, 0.5),
        (0.9, 1.5, 0.6),
        (2.6, 1.5, 0.7),
        (1.2, 1.5, 0.9),
    ]
    entries = []
    for i, center in enumerate(centers):
        trans = [-center[0], -center[1], -center[2]]  # identity rotation: t = -c
        ts = 12.5 if i == 2 else None
        entries.append((mp_str(str(i)), keyframe_entry(trans, ts)))
    payload = mp_map([
        (mp_str("version"), mp_int(1)),
        (mp_str("keyframes"), mp_map(entries)),
        (mp_str("landmarks"), mp_map([])),
    ])
    (GOLDEN / "navmap5.msg").write_bytes(payload)


# -- expected grids, written as literal JSON ----------------------------------

def grid_json(width, height, cell_size, origin, free_cells) -> bytes:
    cells = []
    for row in range(height):
        for col in range(width):
            cells.append("0.0" if (col, row) in free_cells else "1.0")
    return (
        '{"type":"map","cell_size":%s,"cells":[%s],"height":%d,'
        '"origin":[%s,%s],"version":1,"width":%d}'
        % (repr(float(cell_size)), ",".join(cells), height,
           repr(float(origin[0])), repr(float(origin[1])), width)
    ).encode("ascii")


def write_grids() -> None:
    # navmap5.msg at cell_size 1.0, padding 1
    (GOLDEN / "navmap5.grid.json").write_bytes(
        grid_json(5, 3, 1.0, (-0.5, -0.5), {(1, 1), (3, 1)}))
    # straight free corridor along row 1, cols 1..5
    (GOLDEN / "corridor7x3.grid.json").write_bytes(
        grid_json(7, 3, 1.0, (-0.5, -0.5),
                  {(c, 1) for c in range(1, 6)}))


# -- replay trace and the expected server transcript --------------------------

def trace_records():
    # Straight drive through the corridor; 0.25 m steps are exact binary
    # floats so their reprs are stable everywhere.
    records = []
    for i in range(17):
        records.append((0.5 * i, 1.0 + 0.25 * i, 1.0, 0.0))
    return records


def write_trace() -> None:
    lines = []
    for t, x, y, theta in trace_records():
        lines.append('{"t":%s,"pose":[%s,%s,%s],"cmd":[0.5,0.0]}'
                     % (repr(t), repr(x), repr(y), repr(theta)))
    (GOLDEN / "corridor_trace.jsonl").write_bytes(("\n".join(lines) + "\n").encode())


def write_transcript() -> None:
    # What a client sees in replay mode: get_map -> map, set_goal [5,1] ->
    # path, then one position frame per trace record.
    frames = [
        grid_json(7, 3, 1.0, (-0.5, -0.5),
                  {(c, 1) for c in range(1, 6)}).decode("ascii"),
        '{"type":"path","cells":[[1,1],[2,1],[3,1],[4,1],[5,1]],"cost":4.0}',
    ]
    for _t, x, y, theta in trace_records():
        col = int((x - (-0.5)) // 1.0)
        row = int((y - (-0.5)) // 1.0)
        frames.append('{"type":"position","cell":[%d,%d],"pose":[%s,%s,%s]}'
                      % (col, row, repr(x), repr(y), repr(theta)))
    (GOLDEN / "transcript.jsonl").write_bytes(("\n".join(frames) + "\n").encode())


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    write_navmap5()
    write_grids()
    write_trace()
    write_transcript()
    print(f"wrote fixtures to {GOLDEN}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
