"""Binary wavefield snapshots and CSV plane slices.

Snapshot layout (little-endian throughout)::

    b"WF3D"            magic
    u32                format version (1)
    u32 u32 u32        nx ny nz
    f64 f64 f64 f64    hx hy hz t
    f64 * nx*ny*nz     values, x fastest, then y, then z
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import WaveState

MAGIC = b"WF3D"
VERSION = 1
_HEADER = struct.Struct("<4sIIII4d")
AXES = "xyz"


class SnapshotFormatError(ValueError):
    pass


@dataclass
class Snapshot:
    data: np.ndarray  # (nx, ny, nz)
    spacing: tuple
    t: float

    @property
    def shape(self):
        return self.data.shape


def encode_snapshot(data, spacing, t: float) -> bytes:
    data = np.asarray(data, dtype=float)
    if data.ndim != 3:
        raise ValueError("snapshot data must be 3D (nx, ny, nz)")
    nx, ny, nz = data.shape
    head = _HEADER.pack(MAGIC, VERSION, nx, ny, nz, *map(float, spacing), float(t))
    return head + data.astype("<f8").tobytes(order="F")


def decode_snapshot(buf: bytes) -> Snapshot:
    if len(buf) < _HEADER.size:
        raise SnapshotFormatError("truncated snapshot header")
    magic, version, nx, ny, nz, hx, hy, hz, t = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version}")
    n = nx * ny * nz
    if len(buf) != _HEADER.size + 8 * n:
        raise SnapshotFormatError(
            f"payload is {len(buf) - _HEADER.size} bytes, expected {8 * n}")
    vals = np.frombuffer(buf, dtype="<f8", count=n, offset=_HEADER.size)
    return Snapshot(vals.reshape((nx, ny, nz), order="F").astype(float), (hx, hy, hz), t)


def write_snapshot(path, data, spacing, t: float) -> Path:
    path = Path(path)
    path.write_bytes(encode_snapshot(data, spacing, t))
    return path


def read_snapshot(path) -> Snapshot:
    return decode_snapshot(Path(path).read_bytes())


def export_snapshot(state: WaveState, path) -> Path:
    """Write ``state.u_curr`` at time ``state.t``."""
    return write_snapshot(path, state.u_curr, state.grid.spacing, state.t)


def slice_plane(data: np.ndarray, axis: int, index: int) -> np.ndarray:
    """2D plane at 1-based ``index`` along ``axis`` (remaining axes in order)."""
    n = data.shape[axis]
    if not 1 <= index <= n:
        raise IndexError(f"slice index {index} outside 1..{n}")
    return np.take(data, index - 1, axis=axis)


def export_slice(state: WaveState, axis, index: int, path) -> Path:
    """CSV of one grid plane.

    First line ``axis,index,t``, second line their values, then one row per
    node of the second remaining axis, each listing the first remaining
    axis (so the first remaining axis runs fastest).
    """
    ax = AXES.index(axis) if isinstance(axis, str) else int(axis)
    plane = slice_plane(state.u_curr, ax, index)
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["axis", "index", "t"])
        w.writerow([AXES[ax], index, repr(state.t)])
        for row in plane.T:
            w.writerow([repr(float(v)) for v in row])
    return path


def read_slice(path):
    """Inverse of :func:`export_slice`: ``(axis, index, t, plane)``."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3 or rows[0] != ["axis", "index", "t"]:
        raise SnapshotFormatError("not a slice file")
    axis, index, t = rows[1][0], int(rows[1][1]), float(rows[1][2])
    plane = np.array([[float(v) for v in r] for r in rows[2:]]).T
    return axis, index, t, plane
