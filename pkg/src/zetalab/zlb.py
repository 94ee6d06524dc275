"""ZLB1 columnar binary files with JSON sidecars.

Layout (all integers little-endian)::

    b"ZLB1" | u32 version | u32 n_sections
    per section: u64 name_len | name (utf-8) | 8-byte numpy dtype string
                 (space padded, e.g. "<f8     ") | u64 count | raw array bytes

The sidecar ``<file>.json`` holds free-form metadata.  Arrays are stored in
the order given, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import hashlib
import json
import os
import struct
from pathlib import Path

import numpy as np

MAGIC = b"ZLB1"
VERSION = 1


class FormatError(ValueError):
    pass


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def _atomic_write_bytes(path, chunks):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        for chunk in chunks:
            fh.write(chunk)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_sidecar(path, meta):
    _atomic_write_bytes(sidecar_path(path), [dump_json(meta).encode()])


def read_sidecar(path):
    p = sidecar_path(path)
    if not p.exists():
        return {}
    return json.loads(p.read_text())


def write_zlb(path, arrays, meta=None):
    """Write ``arrays`` (name -> ndarray) to ``path``; sidecar if ``meta``."""

    def chunks():
        yield MAGIC + struct.pack("<II", VERSION, len(arrays))
        for name, arr in arrays.items():
            arr = np.ascontiguousarray(arr)
            dt = arr.dtype.newbyteorder("<") if arr.dtype.byteorder == ">" else arr.dtype
            arr = arr.astype(dt, copy=False)
            code = dt.str.encode("ascii")
            if len(code) > 8:
                raise FormatError(f"dtype {dt} not representable")
            raw = name.encode("utf-8")
            yield struct.pack("<Q", len(raw)) + raw + code.ljust(8)
            yield struct.pack("<Q", arr.size)
            yield arr.tobytes()

    _atomic_write_bytes(path, chunks())
    if meta is not None:
        write_sidecar(path, meta)


def read_zlb(path):
    """Return ``(arrays, meta)`` for a ZLB1 file."""
    arrays = {}
    with open(path, "rb") as fh:
        head = fh.read(12)
        if len(head) != 12 or head[:4] != MAGIC:
            raise FormatError(f"{path}: not a ZLB1 file")
        version, count = struct.unpack("<II", head[4:])
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        for _ in range(count):
            (nlen,) = struct.unpack("<Q", fh.read(8))
            name = fh.read(nlen).decode("utf-8")
            dtype = np.dtype(fh.read(8).decode("ascii").strip())
            (size,) = struct.unpack("<Q", fh.read(8))
            arr = np.fromfile(fh, dtype=dtype, count=size)
            if arr.size != size:
                raise FormatError(f"{path}: section {name!r} truncated")
            arrays[name] = arr
    return arrays, read_sidecar(path)


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class ZlbCheckpoint:
    """Resumable prefix of a long 1-D computation, stored as a ZLB1 file.

    ``key`` identifies the computation (config digest); a checkpoint written
    under a different key is ignored.
    """

    def __init__(self, path, key, every=10_000):
        self.path = Path(path)
        self.key = key
        self.every = int(every)

    def load(self):
        if not self.path.exists():
            return None
        arrays, meta = read_zlb(self.path)
        if meta.get("key") != self.key:
            return None
        return arrays["done"]

    def save(self, done):
        write_zlb(self.path, {"done": done}, {"key": self.key, "points": int(done.size)})

    def clear(self):
        for p in (self.path, sidecar_path(self.path)):
            if p.exists():
                p.unlink()
