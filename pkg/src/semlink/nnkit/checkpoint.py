"""Flat binary checkpoint container.

Layout (all integers little-endian)::

    magic        4 bytes   b"SLCK"
    version      u32       currently 1
    meta_len     u32       length of the JSON metadata blob
    meta         meta_len  UTF-8 JSON object
    n_records    u32
    then per record:
      path_len   u16
      path       path_len bytes, UTF-8
      ndim       u8
      dims       ndim x u32
      data       prod(dims) x float32, row-major
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SLCK"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, tensors: dict[str, np.ndarray], meta: dict | None = None) -> None:
    meta_blob = json.dumps(meta or {}, sort_keys=True).encode("utf-8")
    parts = [MAGIC, struct.pack("<II", VERSION, len(meta_blob)), meta_blob,
             struct.pack("<I", len(tensors))]
    for name, arr in tensors.items():
        key = name.encode("utf-8")
        arr = np.asarray(arr)
        parts.append(struct.pack("<H", len(key)) + key)
        parts.append(struct.pack("<B", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict]:
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    version, meta_len = struct.unpack_from("<II", buf, 4)
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    off = 12
    meta = json.loads(buf[off:off + meta_len].decode("utf-8"))
    off += meta_len
    (count,) = struct.unpack_from("<I", buf, off)
    off += 4
    tensors = {}
    try:
        for _ in range(count):
            (klen,) = struct.unpack_from("<H", buf, off)
            off += 2
            name = buf[off:off + klen].decode("utf-8")
            off += klen
            (ndim,) = struct.unpack_from("<B", buf, off)
            off += 1
            shape = struct.unpack_from(f"<{ndim}I", buf, off)
            off += 4 * ndim
            size = int(np.prod(shape, dtype=np.int64))
            arr = np.frombuffer(buf, dtype="<f4", count=size, offset=off).reshape(shape)
            off += 4 * size
            tensors[name] = arr.astype(np.float64)
    except (struct.error, ValueError) as exc:
        raise CheckpointError(f"{path}: truncated or corrupt record ({exc})") from None
    return tensors, meta
