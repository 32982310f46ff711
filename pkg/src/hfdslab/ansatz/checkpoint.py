"""Binary parameter checkpoints.

Layout (all little-endian):

    magic   4 bytes  b"HFDS"
    version u16      currently 1
    count   u16      number of parameter arrays
    table   per array: kind u8 ('c' complex / 'r' real), ndim u8,
            then ndim u32 dimensions
    data    per array: complex64 entries (float32 Re/Im pairs), row-major;
            real arrays are stored with zero imaginary parts

complex64 storage is lossy relative to the in-memory float64 parameters; the
record log, not the checkpoint, is the reproducibility surface.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"HFDS"
VERSION = 1


def save_state(state, path) -> None:
    arrays = [("c", a) for a in state.param_complex_arrays()]
    arrays += [("r", a) for a in state.param_real_arrays()]
    chunks = [MAGIC, struct.pack("<HH", VERSION, len(arrays))]
    for kind, a in arrays:
        chunks.append(struct.pack("<BB", ord(kind), a.ndim))
        chunks.append(struct.pack(f"<{a.ndim}I", *a.shape))
    for kind, a in arrays:
        data = np.ascontiguousarray(a, dtype=np.complex128).astype("<c8")
        chunks.append(data.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_state(state, path) -> None:
    """Read a checkpoint saved from a structurally identical state."""
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise ValueError("not a parameter checkpoint (bad magic)")
    version, count = struct.unpack_from("<HH", buf, 4)
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    pos = 8
    shapes = []
    for _ in range(count):
        kind, ndim = struct.unpack_from("<BB", buf, pos)
        pos += 2
        shape = struct.unpack_from(f"<{ndim}I", buf, pos)
        pos += 4 * ndim
        shapes.append((chr(kind), shape))
    targets = [("c", a) for a in state.param_complex_arrays()]
    targets += [("r", a) for a in state.param_real_arrays()]
    if len(targets) != count:
        raise ValueError(f"checkpoint holds {count} arrays, state has {len(targets)}")
    for (kind, shape), (tkind, arr) in zip(shapes, targets):
        if kind != tkind or tuple(shape) != arr.shape:
            raise ValueError(f"array mismatch: file {kind}{shape} vs state "
                             f"{tkind}{arr.shape}")
        n = int(np.prod(shape, dtype=np.int64)) if shape else 1
        data = np.frombuffer(buf, dtype="<c8", count=n, offset=pos)
        pos += 8 * n
        if kind == "c":
            arr[...] = data.reshape(shape).astype(np.complex128)
        else:
            arr[...] = data.real.reshape(shape).astype(np.float64)
