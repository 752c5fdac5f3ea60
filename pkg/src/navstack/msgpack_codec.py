"""Minimal MessagePack codec for the map-database file format.

Supports the types the NavMap schema uses: nil, bool, int, float, str,
array, and map. Encoding is canonical: shortest header for the value,
floats always as float64, dict insertion order preserved. Decoding
accepts any standard int/float/str/array/map width so files written by
stock serializers parse too.
"""

from __future__ import annotations

import struct
from typing import Any


class MsgpackError(ValueError):
    """Raised when bytes are not decodable MessagePack."""


def packb(obj: Any) -> bytes:
    out = bytearray()
    _pack(obj, out)
    return bytes(out)


def _pack(obj: Any, out: bytearray) -> None:
    if obj is None:
        out.append(0xC0)
    elif obj is True:
        out.append(0xC3)
    elif obj is False:
        out.append(0xC2)
    elif isinstance(obj, int):
        _pack_int(obj, out)
    elif isinstance(obj, float):
        out.append(0xCB)
        out += struct.pack(">d", obj)
    elif isinstance(obj, str):
        data = obj.encode("utf-8")
        n = len(data)
        if n < 32:
            out.append(0xA0 | n)
        elif n < 0x100:
            out += struct.pack(">BB", 0xD9, n)
        elif n < 0x10000:
            out += struct.pack(">BH", 0xDA, n)
        else:
            out += struct.pack(">BI", 0xDB, n)
        out += data
    elif isinstance(obj, (list, tuple)):
        n = len(obj)
        if n < 16:
            out.append(0x90 | n)
        elif n < 0x10000:
            out += struct.pack(">BH", 0xDC, n)
        else:
            out += struct.pack(">BI", 0xDD, n)
        for item in obj:
            _pack(item, out)
    elif isinstance(obj, dict):
        n = len(obj)
        if n < 16:
            out.append(0x80 | n)
        elif n < 0x10000:
            out += struct.pack(">BH", 0xDE, n)
        else:
            out += struct.pack(">BI", 0xDF, n)
        for key, value in obj.items():
            _pack(key, out)
            _pack(value, out)
    else:
        raise MsgpackError(f"cannot pack {type(obj).__name__}")


def _pack_int(value: int, out: bytearray) -> None:
    if 0 <= value < 0x80:
        out.append(value)
    elif -32 <= value < 0:
        out.append(value & 0xFF)
    elif 0 <= value < 0x100:
        out += struct.pack(">BB", 0xCC, value)
    elif 0 <= value < 0x10000:
        out += struct.pack(">BH", 0xCD, value)
    elif 0 <= value < 0x100000000:
        out += struct.pack(">BI", 0xCE, value)
    elif 0 <= value < 0x10000000000000000:
        out += struct.pack(">BQ", 0xCF, value)
    elif -0x80 <= value < 0:
        out += struct.pack(">Bb", 0xD0, value)
    elif -0x8000 <= value < 0:
        out += struct.pack(">Bh", 0xD1, value)
    elif -0x80000000 <= value < 0:
        out += struct.pack(">Bi", 0xD2, value)
    elif -0x8000000000000000 <= value < 0:
        out += struct.pack(">Bq", 0xD3, value)
    else:
        raise MsgpackError("integer out of 64-bit range")


def unpackb(data: bytes) -> Any:
    obj, pos = _unpack(data, 0)
    if pos != len(data):
        raise MsgpackError(f"{len(data) - pos} trailing bytes after value")
    return obj


def _unpack(data: bytes, pos: int) -> tuple[Any, int]:
    if pos >= len(data):
        raise MsgpackError("truncated input")
    tag = data[pos]
    pos += 1

    if tag < 0x80:  # positive fixint
        return tag, pos
    if tag >= 0xE0:  # negative fixint
        return tag - 0x100, pos
    if 0x80 <= tag < 0x90:
        return _unpack_map(data, pos, tag & 0x0F)
    if 0x90 <= tag < 0xA0:
        return _unpack_array(data, pos, tag & 0x0F)
    if 0xA0 <= tag < 0xC0:
        return _unpack_str(data, pos, tag & 0x1F)

    if tag == 0xC0:
        return None, pos
    if tag == 0xC2:
        return False, pos
    if tag == 0xC3:
        return True, pos

    if tag in (0xCC, 0xCD, 0xCE, 0xCF):
        fmt = {0xCC: ">B", 0xCD: ">H", 0xCE: ">I", 0xCF: ">Q"}[tag]
        return _unpack_struct(data, pos, fmt)
    if tag in (0xD0, 0xD1, 0xD2, 0xD3):
        fmt = {0xD0: ">b", 0xD1: ">h", 0xD2: ">i", 0xD3: ">q"}[tag]
        return _unpack_struct(data, pos, fmt)
    if tag == 0xCA:
        return _unpack_struct(data, pos, ">f")
    if tag == 0xCB:
        return _unpack_struct(data, pos, ">d")

    if tag in (0xD9, 0xDA, 0xDB):
        fmt = {0xD9: ">B", 0xDA: ">H", 0xDB: ">I"}[tag]
        n, pos = _unpack_struct(data, pos, fmt)
        return _unpack_str(data, pos, n)
    if tag in (0xDC, 0xDD):
        fmt = {0xDC: ">H", 0xDD: ">I"}[tag]
        n, pos = _unpack_struct(data, pos, fmt)
        return _unpack_array(data, pos, n)
    if tag in (0xDE, 0xDF):
        fmt = {0xDE: ">H", 0xDF: ">I"}[tag]
        n, pos = _unpack_struct(data, pos, fmt)
        return _unpack_map(data, pos, n)

    raise MsgpackError(f"unsupported type tag 0x{tag:02x}")


def _unpack_struct(data: bytes, pos: int, fmt: str) -> tuple[Any, int]:
    size = struct.calcsize(fmt)
    if pos + size > len(data):
        raise MsgpackError("truncated input")
    return struct.unpack_from(fmt, data, pos)[0], pos + size


def _unpack_str(data: bytes, pos: int, n: int) -> tuple[str, int]:
    if pos + n > len(data):
        raise MsgpackError("truncated input")
    try:
        text = data[pos:pos + n].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MsgpackError("invalid utf-8 in string") from exc
    return text, pos + n


def _unpack_array(data: bytes, pos: int, n: int) -> tuple[list, int]:
    items = []
    for _ in range(n):
        item, pos = _unpack(data, pos)
        items.append(item)
    return items, pos


def _unpack_map(data: bytes, pos: int, n: int) -> tuple[dict, int]:
    result: dict = {}
    for _ in range(n):
        key, pos = _unpack(data, pos)
        if not isinstance(key, (str, int)):
            raise MsgpackError(f"unhashable map key type {type(key).__name__}")
        if key in result:
            raise MsgpackError(f"duplicate map key {key!r}")
        value, pos = _unpack(data, pos)
        result[key] = value
    return result, pos
