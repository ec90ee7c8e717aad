"""Binary field snapshots.

Layout (little-endian):

    b"QLAF"  u32 version  u32 nx  u32 ny  u32 ncomp  f64 delta  u64 step
    float64 payload, (ny, nx, ncomp) row-major
    u32 CRC32 of everything before it
"""
from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lattice import NCOMP, LatticeGrid, QubitField

MAGIC = b"QLAF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIdQ")


class SnapshotError(ValueError):
    pass


@dataclass(frozen=True)
class Snapshot:
    field: QubitField
    step: int
    version: int


def encode_snapshot(field: QubitField, step: int = 0) -> bytes:
    if step < 0:
        raise ValueError("step must be >= 0")
    g = field.grid
    head = _HEADER.pack(MAGIC, VERSION, g.nx_sites, g.ny_sites, NCOMP, float(g.delta), int(step))
    body = head + field.amplitudes.astype("<f8", copy=False).tobytes(order="C")
    return body + struct.pack("<I", zlib.crc32(body))


def decode_snapshot(data: bytes) -> Snapshot:
    if len(data) < _HEADER.size + 4:
        raise SnapshotError("truncated snapshot header")
    magic, version, nx, ny, ncomp, delta, step = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version} (this build reads {VERSION})")
    if ncomp != NCOMP:
        raise SnapshotError(f"expected {NCOMP} components, found {ncomp}")
    n = nx * ny * ncomp * 8
    if len(data) != _HEADER.size + n + 4:
        raise SnapshotError(f"payload size mismatch: {len(data)} bytes for {nx}x{ny}")
    (crc,) = struct.unpack_from("<I", data, len(data) - 4)
    if zlib.crc32(data[:-4]) != crc:
        raise SnapshotError("CRC mismatch, snapshot is corrupt")
    try:
        grid = LatticeGrid(nx, ny, delta)
    except ValueError as exc:
        raise SnapshotError(f"invalid grid in header: {exc}") from None
    amp = np.frombuffer(data, dtype="<f8", count=nx * ny * ncomp, offset=_HEADER.size)
    amp = amp.reshape(ny, nx, ncomp).astype(np.float64)
    return Snapshot(QubitField(grid, amp, check=False), int(step), version)


def write_snapshot(path, field: QubitField, step: int = 0) -> Path:
    path = Path(path)
    path.write_bytes(encode_snapshot(field, step))
    return path


def read_snapshot(path) -> Snapshot:
    return decode_snapshot(Path(path).read_bytes())


# Raster media: b"QLAN" u32 nx u32 ny u32 ncomp (1 or 3), float64 payload
# (ncomp, ny, nx) row-major.
RASTER_MAGIC = b"QLAN"
_RASTER_HEADER = struct.Struct("<4sIII")


def write_raster(path, values) -> Path:
    v = np.asarray(values, dtype="<f8")
    if v.ndim == 2:
        v = v[None]
    if v.ndim != 3 or v.shape[0] not in (1, 3):
        raise ValueError(f"raster must have shape (ny, nx) or (3, ny, nx), got {v.shape}")
    ncomp, ny, nx = v.shape
    path = Path(path)
    path.write_bytes(_RASTER_HEADER.pack(RASTER_MAGIC, nx, ny, ncomp) + v.tobytes(order="C"))
    return path


def read_raster(path) -> np.ndarray:
    """Returns (ny, nx) for one component, else (3, ny, nx)."""
    data = Path(path).read_bytes()
    if len(data) < _RASTER_HEADER.size:
        raise SnapshotError("truncated raster header")
    magic, nx, ny, ncomp = _RASTER_HEADER.unpack_from(data)
    if magic != RASTER_MAGIC:
        raise SnapshotError(f"bad raster magic {magic!r}")
    if ncomp not in (1, 3):
        raise SnapshotError(f"raster component count must be 1 or 3, got {ncomp}")
    if len(data) != _RASTER_HEADER.size + 8 * nx * ny * ncomp:
        raise SnapshotError("raster payload size mismatch")
    v = np.frombuffer(data, dtype="<f8", offset=_RASTER_HEADER.size).reshape(ncomp, ny, nx).astype(float)
    return v[0] if ncomp == 1 else v
