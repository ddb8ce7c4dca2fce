"""Binary tensor dumps and named-tensor checkpoint archives.

Tensor blob layout: magic ``SRKD``, one version byte (0x01), one dtype byte
(0x01 = little-endian IEEE-754 float64, 0x02 = little-endian uint32), one
rank byte, ``rank`` unsigned 32-bit little-endian dims, then the payload in
row-major order. Round-trips are bit-exact.

A checkpoint archive is a count-prefixed sequence of entries, each a
length-prefixed UTF-8 name followed by one tensor blob; entries are written
in lexicographic name order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ContractError

MAGIC = b"SRKD"
VERSION = 1

_DTYPES = {
    0x01: np.dtype("<f8"),
    0x02: np.dtype("<u4"),
}
_DTYPE_CODES = {v: k for k, v in _DTYPES.items()}


def dump_tensor_bytes(array):
    arr = np.asarray(array)
    if arr.dtype == np.float64:
        arr = arr.astype("<f8", copy=False)
    elif arr.dtype == np.uint32:
        arr = arr.astype("<u4", copy=False)
    else:
        raise ContractError(f"unsupported dtype for dump: {arr.dtype}")
    code = _DTYPE_CODES[arr.dtype]
    if arr.ndim > 255:
        raise ContractError(f"rank {arr.ndim} exceeds the format's rank byte")
    header = MAGIC + bytes([VERSION, code, arr.ndim])
    dims = struct.pack(f"<{arr.ndim}I", *arr.shape) if arr.ndim else b""
    return header + dims + np.ascontiguousarray(arr).tobytes(order="C")


def load_tensor_bytes(blob, offset=0):
    """Parse one tensor blob; returns ``(array, next_offset)``."""
    if blob[offset : offset + 4] != MAGIC:
        raise ContractError("bad magic bytes, not an SRKD tensor blob")
    version, code, rank = blob[offset + 4 : offset + 7]
    if version != VERSION:
        raise ContractError(f"unsupported SRKD version {version}")
    if code not in _DTYPES:
        raise ContractError(f"unknown dtype byte 0x{code:02x}")
    pos = offset + 7
    dims = struct.unpack_from(f"<{rank}I", blob, pos)
    pos += 4 * rank
    dtype = _DTYPES[code]
    count = int(np.prod(dims)) if rank else 1
    arr = np.frombuffer(blob, dtype=dtype, count=count, offset=pos).reshape(dims)
    return arr.copy(), pos + count * dtype.itemsize


def save_tensor(path, array):
    Path(path).write_bytes(dump_tensor_bytes(array))


def load_tensor(path):
    arr, _ = load_tensor_bytes(Path(path).read_bytes())
    return arr


def save_checkpoint(path, named_tensors):
    """Write a mapping of name -> ndarray, lexicographically ordered."""
    names = sorted(named_tensors)
    parts = [struct.pack("<I", len(names))]
    for name in names:
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<I", len(encoded)))
        parts.append(encoded)
        parts.append(dump_tensor_bytes(named_tensors[name]))
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path):
    blob = Path(path).read_bytes()
    (count,) = struct.unpack_from("<I", blob, 0)
    pos = 4
    out = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        name = blob[pos : pos + name_len].decode("utf-8")
        pos += name_len
        arr, pos = load_tensor_bytes(blob, pos)
        out[name] = arr
    return out
