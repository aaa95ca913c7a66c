"""Sectioned binary container with per-section checksums.

Shared on-disk format for graph snapshots and model checkpoints: a
little-endian header followed by named sections, each carrying its own
CRC32. Loading verifies every checksum before any object is materialized,
so a corrupted file never yields a partial result.

Layout::

    magic (8 bytes) | format version u16 | section count u16
    per section: name length u8 | name utf-8 | payload length u64 | crc32 u32 | payload
"""

from __future__ import annotations

import json
import struct
import zlib

import numpy as np

from .errors import SnapshotChecksumError, SnapshotTruncatedError, SnapshotVersionError

_HEADER = struct.Struct("<8sHH")
_SECTION_HEAD = struct.Struct("<B")
_SECTION_META = struct.Struct("<QI")


def write_container(path, magic: bytes, version: int, sections: dict[str, bytes]) -> None:
    if len(magic) != 8:
        raise ValueError("magic must be exactly 8 bytes")
    parts = [_HEADER.pack(magic, version, len(sections))]
    for name, payload in sections.items():
        raw_name = name.encode("utf-8")
        parts.append(_SECTION_HEAD.pack(len(raw_name)))
        parts.append(raw_name)
        parts.append(_SECTION_META.pack(len(payload), zlib.crc32(payload) & 0xFFFFFFFF))
        parts.append(payload)
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def read_container(path, magic: bytes, version: int) -> dict[str, bytes]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise SnapshotTruncatedError(f"{path}: file shorter than header")
    got_magic, got_version, count = _HEADER.unpack_from(blob, 0)
    if got_magic != magic:
        raise SnapshotVersionError(f"{path}: bad magic {got_magic!r}, expected {magic!r}")
    if got_version != version:
        raise SnapshotVersionError(
            f"{path}: format version {got_version}, reader supports {version}"
        )
    sections: dict[str, bytes] = {}
    offset = _HEADER.size
    for _ in range(count):
        if offset + _SECTION_HEAD.size > len(blob):
            raise SnapshotTruncatedError(f"{path}: truncated section header")
        (name_len,) = _SECTION_HEAD.unpack_from(blob, offset)
        offset += _SECTION_HEAD.size
        if offset + name_len + _SECTION_META.size > len(blob):
            raise SnapshotTruncatedError(f"{path}: truncated section name/meta")
        name = blob[offset : offset + name_len].decode("utf-8")
        offset += name_len
        length, crc = _SECTION_META.unpack_from(blob, offset)
        offset += _SECTION_META.size
        if offset + length > len(blob):
            raise SnapshotTruncatedError(f"{path}: section {name!r} past end of file")
        payload = blob[offset : offset + length]
        offset += length
        if (zlib.crc32(payload) & 0xFFFFFFFF) != crc:
            raise SnapshotChecksumError(f"{path}: checksum mismatch in section {name!r}")
        sections[name] = payload
    if offset != len(blob):
        raise SnapshotChecksumError(f"{path}: {len(blob) - offset} trailing bytes")
    return sections


def pack_array(arr: np.ndarray) -> bytes:
    """Serialize an array as dtype-tag | ndim | shape | little-endian data."""
    arr = np.ascontiguousarray(arr)
    dtype = arr.dtype.newbyteorder("<")
    tag = dtype.str.encode("ascii")
    head = struct.pack("<B", len(tag)) + tag
    head += struct.pack("<B", arr.ndim) + struct.pack(f"<{arr.ndim}q", *arr.shape)
    return head + arr.astype(dtype, copy=False).tobytes()


def unpack_array(payload: bytes) -> np.ndarray:
    (tag_len,) = struct.unpack_from("<B", payload, 0)
    offset = 1
    dtype = np.dtype(payload[offset : offset + tag_len].decode("ascii"))
    offset += tag_len
    (ndim,) = struct.unpack_from("<B", payload, offset)
    offset += 1
    shape = struct.unpack_from(f"<{ndim}q", payload, offset)
    offset += 8 * ndim
    return np.frombuffer(payload, dtype=dtype, offset=offset).reshape(shape).copy()


def pack_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def unpack_json(payload: bytes):
    return json.loads(payload.decode("utf-8"))
