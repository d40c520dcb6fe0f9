"""Binary snapshots of a simulation state.

Layout (all little-endian)::

    offset  size  field
    0       8     magic b"DEGCHSNP"
    8       4     uint32 format version
    12      4     uint32 dim
    16      4     uint32 n (points per axis)
    20      4     uint32 reserved (0)
    24      8     float64 t
    32      8     uint64 step_count
    40      8     float64 dt_next (NaN when unset)
    48      32    SHA-256 parameter digest
    80      8 n^dim  float64 field values, row-major
    end-32  32    SHA-256 of everything before it
"""
import hashlib
import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..dynamics import SimState
from ..errors import CorruptPayload, DigestMismatch, VersionMismatch
from ..spectral import PeriodicField, PeriodicGrid

MAGIC = b"DEGCHSNP"
VERSION = 1
_HEADER = struct.Struct("<8sIIIIdQd32s")
HEADER_SIZE = _HEADER.size
CHECKSUM_SIZE = 32


@dataclass
class Snapshot:
    version: int
    t: float
    step_count: int
    dt_next: Optional[float]
    grid: PeriodicGrid
    digest: bytes
    values: np.ndarray

    def state(self, params=None):
        return SimState(self.t, PeriodicField(self.grid, self.values), params,
                        self.step_count, self.dt_next)


def encode(state, digest):
    u = state.u
    G = u.grid
    if len(digest) != 32:
        raise ValueError("digest must be 32 bytes")
    dt = math.nan if state.dt_next is None else float(state.dt_next)
    head = _HEADER.pack(MAGIC, VERSION, G.dim, G.n, 0, float(state.t), int(state.step_count), dt,
                        bytes(digest))
    body = head + np.ascontiguousarray(u.values, dtype="<f8").tobytes()
    return body + hashlib.sha256(body).digest()


def decode(data):
    if len(data) < HEADER_SIZE + CHECKSUM_SIZE:
        raise CorruptPayload("snapshot shorter than its header")
    magic, version, dim, n, _, t, steps, dt, digest = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptPayload("not a snapshot file (bad magic)")
    if version != VERSION:
        raise VersionMismatch(f"snapshot version {version}, expected {VERSION}")
    try:
        grid = PeriodicGrid(dim, n)
    except ValueError as e:
        raise CorruptPayload(f"bad grid in header: {e}") from None
    expected = HEADER_SIZE + 8 * grid.size + CHECKSUM_SIZE
    if len(data) != expected:
        raise CorruptPayload(f"snapshot has {len(data)} bytes, expected {expected}")
    body, check = data[:-CHECKSUM_SIZE], data[-CHECKSUM_SIZE:]
    if hashlib.sha256(body).digest() != check:
        raise CorruptPayload("checksum mismatch")
    vals = np.frombuffer(body, dtype="<f8", offset=HEADER_SIZE).astype(np.float64).reshape(grid.shape)
    return Snapshot(version, t, steps, None if math.isnan(dt) else dt, grid, digest, vals)


def write_snapshot(state, path, digest=None):
    """Write ``state``; the digest defaults to the one of its parameters."""
    if digest is None:
        from .config import params_digest
        digest = params_digest(state.params, state.u.grid)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(encode(state, digest))
    os.replace(tmp, path)
    return path


def load_snapshot(path):
    return decode(Path(path).read_bytes())


def read_snapshot(path, params=None, expected_digest=None):
    """Read a snapshot into a :class:`SimState`.

    When ``params`` (or an explicit digest) is given, the stored parameter
    digest must match it.
    """
    snap = load_snapshot(path)
    if expected_digest is None and params is not None:
        from .config import params_digest
        expected_digest = params_digest(params, snap.grid)
    if expected_digest is not None and expected_digest != snap.digest:
        raise DigestMismatch("snapshot parameters differ from the configuration")
    return snap.state(params)
