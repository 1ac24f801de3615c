"""RFMX binary matrix files.

Layout: magic ``RFMX``, one dtype byte (0 = float64 real, 1 = float64
complex interleaved), u64 little-endian row count, u64 column count, then
the row-major payload. Complex entries are stored as (re, im) pairs.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .exceptions import MatrixFormatError, ValidationError

MAGIC = b"RFMX"
TAG_REAL = 0
TAG_COMPLEX = 1

_HEADER_LEN = 4 + 1 + 8 + 8


def write_matrix(path, M) -> None:
    """Write a real or complex 2-D array to ``path`` in RFMX format."""
    A = np.asarray(M)
    if A.ndim != 2:
        raise ValidationError(f"RFMX stores 2-D matrices, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("refusing to write non-finite entries")
    if np.iscomplexobj(A):
        tag = TAG_COMPLEX
        payload = np.ascontiguousarray(A, dtype="<c16").tobytes()
    else:
        tag = TAG_REAL
        payload = np.ascontiguousarray(A, dtype="<f8").tobytes()
    rows, cols = A.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([tag]))
        fh.write(np.uint64(rows).tobytes())
        fh.write(np.uint64(cols).tobytes())
        fh.write(payload)


def read_matrix(path) -> np.ndarray:
    """Read an RFMX file; returns float64 or complex128 2-D array."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER_LEN:
        raise MatrixFormatError("truncated header", offset=len(raw))
    if raw[:4] != MAGIC:
        raise MatrixFormatError(f"bad magic {raw[:4]!r}", offset=0)
    tag = raw[4]
    if tag not in (TAG_REAL, TAG_COMPLEX):
        raise MatrixFormatError(f"unknown dtype tag {tag}", offset=4)
    rows = int(np.frombuffer(raw, dtype="<u8", count=1, offset=5)[0])
    cols = int(np.frombuffer(raw, dtype="<u8", count=1, offset=13)[0])
    itemsize = 16 if tag == TAG_COMPLEX else 8
    expected = rows * cols * itemsize
    got = len(raw) - _HEADER_LEN
    if got != expected:
        raise MatrixFormatError(
            f"payload of {got} bytes does not match {rows}x{cols} "
            f"({expected} bytes expected)",
            offset=_HEADER_LEN,
        )
    dtype = "<c16" if tag == TAG_COMPLEX else "<f8"
    A = np.frombuffer(raw, dtype=dtype, offset=_HEADER_LEN).reshape(rows, cols)
    if not np.all(np.isfinite(A)):
        bad = int(np.flatnonzero(~np.isfinite(A.ravel()))[0])
        raise MatrixFormatError(
            "non-finite entry in payload", offset=_HEADER_LEN + bad * itemsize
        )
    return A.copy()


def matrix_bytes(M) -> bytes:
    """RFMX encoding of a matrix as bytes (used for content hashing)."""
    buf = io.BytesIO()
    A = np.asarray(M)
    if np.iscomplexobj(A):
        buf.write(MAGIC + bytes([TAG_COMPLEX]))
        payload = np.ascontiguousarray(A, dtype="<c16").tobytes()
    else:
        buf.write(MAGIC + bytes([TAG_REAL]))
        payload = np.ascontiguousarray(A, dtype="<f8").tobytes()
    buf.write(np.uint64(A.shape[0]).tobytes())
    buf.write(np.uint64(A.shape[1]).tobytes())
    buf.write(payload)
    return buf.getvalue()
