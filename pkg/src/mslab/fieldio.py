"""Binary and CSV serialization of sampled fields.

Binary layout (little-endian): ``b"MSLF"``, version u32, dim u32, N u32,
L f64, then interleaved ``(re, im)`` f64 pairs in row-major order.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .grid import ConfigError, Grid, SampledField

MAGIC = b"MSLF"
VERSION = 1
_HEADER = struct.Struct("<4sIIId")


def dumps_field(f: SampledField) -> bytes:
    g = f.grid
    head = _HEADER.pack(MAGIC, VERSION, g.dim, g.n, g.length)
    body = np.ascontiguousarray(f.values, dtype="<c16").tobytes(order="C")
    return head + body


def loads_field(data: bytes) -> SampledField:
    if len(data) < _HEADER.size:
        raise ConfigError("field file too short")
    magic, version, dim, n, length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ConfigError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ConfigError(f"unsupported field version {version}")
    grid = Grid(dim, n, length)
    body = data[_HEADER.size:]
    if len(body) != 16 * grid.size:
        raise ConfigError(f"expected {16 * grid.size} payload bytes, got {len(body)}")
    vals = np.frombuffer(body, dtype="<c16").reshape(grid.shape)
    return SampledField(grid, vals)


def write_field(path, f: SampledField) -> None:
    Path(path).write_bytes(dumps_field(f))


def read_field(path) -> SampledField:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"field file not found: {p}")
    return loads_field(p.read_bytes())


def write_csv(path, f: SampledField) -> None:
    g = f.grid
    coords = g.coords().reshape(-1, g.dim)
    vals = f.values.reshape(-1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x_{i}" for i in range(g.dim)] + ["re", "im"])
        for x, v in zip(coords, vals):
            w.writerow([repr(float(c)) for c in x] + [repr(float(v.real)), repr(float(v.imag))])
