"""Bit-exact binary tensor files (ATNB format).

Layout, all integers little-endian:

    offset  size  field
    0       4     magic b"ATNB"
    4       2     format version, uint16 (currently 1)
    6       1     dtype code, uint8 (0 = 32-bit float)
    7       1     reserved, written as 0
    8       4     dimension count, uint32 (1..4)
    12      8*n   dimensions, uint64 each
    ...           payload: row-major little-endian float32

Writing the same tensor twice produces byte-identical files.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from .errors import EncodingError, FormatError, IoError

MAGIC = b"ATNB"
VERSION = 1
DTYPE_F32 = 0

_HEAD = struct.Struct("<4sHBBI")


def write_tensor(data: np.ndarray, destination: str | os.PathLike) -> None:
    """Serialize ``data`` (1-4 dims, finite float values) to ``destination``."""
    arr = np.asarray(data)
    if arr.ndim < 1 or arr.ndim > 4:
        raise EncodingError(f"tensor must have 1-4 dimensions, got {arr.ndim}")
    if not np.isfinite(arr).all():
        raise EncodingError("tensor contains non-finite entries")
    payload = np.ascontiguousarray(arr, dtype="<f4")
    header = _HEAD.pack(MAGIC, VERSION, DTYPE_F32, 0, arr.ndim)
    dims = struct.pack(f"<{arr.ndim}Q", *arr.shape)
    try:
        with open(destination, "wb") as fh:
            fh.write(header)
            fh.write(dims)
            fh.write(payload.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {destination}: {exc}") from exc


def read_tensor(source: str | os.PathLike) -> np.ndarray:
    """Exact inverse of :func:`write_tensor`; returns a float32 array."""
    try:
        raw = Path(source).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {source}: {exc}") from exc
    if len(raw) < _HEAD.size:
        raise FormatError(f"{source}: truncated header")
    magic, version, dtype, _reserved, ndim = _HEAD.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{source}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{source}: unsupported version {version}")
    if dtype != DTYPE_F32:
        raise FormatError(f"{source}: unsupported dtype code {dtype}")
    if ndim < 1 or ndim > 4:
        raise FormatError(f"{source}: bad dimension count {ndim}")
    dims_end = _HEAD.size + 8 * ndim
    if len(raw) < dims_end:
        raise FormatError(f"{source}: truncated dimension table")
    shape = struct.unpack_from(f"<{ndim}Q", raw, _HEAD.size)
    count = 1
    for d in shape:
        count *= d
    expected = dims_end + 4 * count
    if len(raw) != expected:
        raise FormatError(
            f"{source}: payload is {len(raw) - dims_end} bytes, expected {4 * count}"
        )
    flat = np.frombuffer(raw, dtype="<f4", count=count, offset=dims_end)
    return flat.reshape(shape).copy()
