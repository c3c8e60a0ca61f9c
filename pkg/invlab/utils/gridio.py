# invlab/utils/gridio.py
"""
Byte-exact codec for gridded densities.

Layout (little-endian):
    uint32      n
    uint32[n]   samples per axis
    float64[n]  lower bounds
    float64[n]  upper bounds
    complex64[] samples, row-major (C order), each stored as (re, im) float32
"""

import struct
from pathlib import Path
from typing import Tuple

import numpy as np

from invlab.core.errors import InvalidInputError

_U32 = "<I"


def encode_grid(lower, upper, samples: np.ndarray) -> bytes:
    samples = np.asarray(samples)
    n = samples.ndim
    if len(lower) != n or len(upper) != n:
        raise InvalidInputError("Box bounds do not match sample dimension")
    header = struct.pack(_U32, n)
    header += struct.pack(f"<{n}I", *samples.shape)
    header += struct.pack(f"<{n}d", *map(float, lower))
    header += struct.pack(f"<{n}d", *map(float, upper))
    body = np.ascontiguousarray(samples, dtype="<c8").tobytes(order="C")
    return header + body


def decode_grid(blob: bytes) -> Tuple[Tuple[float, ...], Tuple[float, ...], np.ndarray]:
    if len(blob) < 4:
        raise InvalidInputError("Grid blob too short for header")
    (n,) = struct.unpack_from(_U32, blob, 0)
    offset = 4
    head_size = 4 * n + 16 * n
    if n == 0 or len(blob) < offset + head_size:
        raise InvalidInputError(f"Corrupt grid header (n={n})")
    shape = struct.unpack_from(f"<{n}I", blob, offset)
    offset += 4 * n
    lower = struct.unpack_from(f"<{n}d", blob, offset)
    offset += 8 * n
    upper = struct.unpack_from(f"<{n}d", blob, offset)
    offset += 8 * n
    count = int(np.prod(shape))
    if len(blob) - offset != 8 * count:
        raise InvalidInputError(f"Grid body has {len(blob) - offset} bytes, expected {8 * count}")
    samples = np.frombuffer(blob, dtype="<c8", count=count, offset=offset).reshape(shape)
    return lower, upper, samples.astype(np.complex128)


def write_grid(path: Path, lower, upper, samples: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_grid(lower, upper, samples))
    return path


def read_grid(path: Path):
    return decode_grid(Path(path).read_bytes())
