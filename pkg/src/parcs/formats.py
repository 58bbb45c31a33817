"""File formats: binary PGM images, raw YUV 4:2:0 video, measurement files.

The measurement file is the codec's wire format: a little-endian
self-describing header (shape, measurement count, sensing seed, permutation
tag, frame index, frame kind) followed by the K x N measurement matrix as
row-major float64. Sensing matrices are never stored; the header's
(k, rows, seed) triple regenerates them.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .codec import IMAGE, NONREFERENCE, REFERENCE, FrameCode

__all__ = [
    "read_pgm",
    "write_pgm",
    "read_yuv_luminance",
    "write_measurements",
    "read_measurements",
]

_MAGIC = b"PCSM"
_VERSION = 1
_HEADER = struct.Struct("<4sHBBIIIIQ")  # magic, version, kind, tag length, rows, cols, k, frame index, seed
_KIND_CODES = {REFERENCE: 0, NONREFERENCE: 1, IMAGE: 2}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}


def write_measurements(path, code: FrameCode) -> None:
    tag = code.perm_tag.encode("ascii")
    if len(tag) > 255:
        raise ValueError("permutation tag too long")
    header = _HEADER.pack(_MAGIC, _VERSION, _KIND_CODES[code.kind], len(tag),
                          code.rows, code.cols, code.k, code.frame_index, code.seed)
    payload = np.ascontiguousarray(code.measurements, dtype="<f8").tobytes()
    Path(path).write_bytes(header + tag + payload)


def read_measurements(path) -> FrameCode:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated measurement file")
    magic, version, kind_code, tag_len, rows, cols, k, frame_index, seed = \
        _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError(f"{path}: not a measurement file")
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    if kind_code not in _KIND_NAMES:
        raise ValueError(f"{path}: unknown frame kind {kind_code}")
    offset = _HEADER.size
    tag = raw[offset:offset + tag_len].decode("ascii")
    offset += tag_len
    expected = k * cols * 8
    if len(raw) - offset != expected:
        raise ValueError(f"{path}: payload is {len(raw) - offset} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype="<f8", count=k * cols, offset=offset)
    return FrameCode(rows, cols, k, seed, tag, frame_index, _KIND_NAMES[kind_code],
                     data.reshape(k, cols))


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) 8-bit grayscale PGM into a uint8 matrix."""
    raw = Path(path).read_bytes()
    fields = []
    pos = 0
    # header: magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments allowed between them
    while len(fields) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        fields.append(raw[start:pos])
    if fields[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {fields[0]!r})")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    pos += 1  # single whitespace byte after maxval
    pixels = np.frombuffer(raw, dtype=np.uint8, count=width * height, offset=pos)
    if pixels.size != width * height:
        raise ValueError(f"{path}: pixel data truncated")
    return pixels.reshape(height, width).copy()


def write_pgm(path, pixels: np.ndarray) -> None:
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise ValueError("PGM payload must be a 2D matrix")
    if arr.dtype != np.uint8:
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("pixel values must lie in [0, 255]")
        arr = np.rint(arr).astype(np.uint8)
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def read_yuv_luminance(path, width: int = 176, height: int = 144,
                       count: int | None = None) -> list[np.ndarray]:
    """Read the Y planes of a raw planar YUV 4:2:0 file (QCIF by default).

    Chroma planes are skipped. ``count`` limits the number of frames; by
    default all complete frames are read. Raises on empty or truncated
    input, naming the offending frame.
    """
    raw = Path(path).read_bytes()
    y_size = width * height
    frame_size = y_size * 3 // 2
    if count is None:
        if len(raw) < frame_size:
            raise ValueError(f"{path}: no complete {width}x{height} frame "
                             f"({len(raw)} bytes < {frame_size})")
        count = len(raw) // frame_size
    frames = []
    for idx in range(count):
        offset = idx * frame_size
        if offset + frame_size > len(raw):
            raise ValueError(f"{path}: frame {idx + 1} truncated "
                             f"(need {offset + frame_size} bytes, file has {len(raw)})")
        plane = np.frombuffer(raw, dtype=np.uint8, count=y_size, offset=offset)
        frames.append(plane.reshape(height, width).copy())
    return frames
