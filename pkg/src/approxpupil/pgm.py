"""Binary PGM (P5, maxval 255) reader and writer."""

from __future__ import annotations

import os

import numpy as np

from .errors import PGMFormatError, PGMParseError

_WHITESPACE = b" \t\n\r\v\f"


def _header_tokens(data: bytes, count: int, pos: int):
    """Yield ``(token, start, end)`` for `count` header fields from `pos`, skipping comments."""
    n = len(data)
    for _ in range(count):
        while pos < n:
            c = data[pos:pos + 1]
            if c in _WHITESPACE:
                pos += 1
            elif c == b"#":
                while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                break
        if pos >= n:
            raise PGMParseError("unexpected end of header", offset=pos)
        start = pos
        while pos < n and data[pos:pos + 1] not in _WHITESPACE and data[pos:pos + 1] != b"#":
            pos += 1
        yield data[start:pos], start, pos


def decode_pgm(data: bytes) -> np.ndarray:
    if len(data) < 2:
        raise PGMParseError("file too short for a PGM header", offset=len(data))
    magic = data[:2]
    if magic == b"P2":
        raise PGMFormatError("ASCII PGM (P2) is not supported; convert to binary P5", offset=0)
    if magic != b"P5":
        raise PGMParseError(f"bad magic {magic!r}, expected b'P5'", offset=0)

    fields = []
    end = 2
    if len(data) > 2 and data[2:3] not in _WHITESPACE:
        raise PGMParseError("missing whitespace after magic", offset=2)
    for tok, start, end in _header_tokens(data, 3, 2):
        if not tok.isdigit():
            raise PGMParseError(f"expected a decimal header field, got {tok!r}", offset=start)
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PGMParseError(f"invalid dimensions {width}x{height}", offset=end)
    if maxval != 255:
        raise PGMFormatError(f"unsupported maxval {maxval}; only 8-bit (255) is accepted",
                             offset=end)
    if end >= len(data) or data[end:end + 1] not in _WHITESPACE:
        raise PGMParseError("expected a single whitespace byte after maxval", offset=end)
    payload = data[end + 1:]
    expected = width * height
    if len(payload) < expected:
        raise PGMParseError(
            f"truncated pixel payload: expected {expected} bytes, got {len(payload)}",
            offset=end + 1 + len(payload))
    if len(payload) > expected:
        raise PGMParseError(
            f"{len(payload) - expected} trailing bytes after {expected}-byte payload",
            offset=end + 1 + expected)
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def encode_pgm(img) -> bytes:
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D raster, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise ValueError("PGM pixels must lie in 0..255")
    h, w = arr.shape
    return b"P5\n%d %d\n255\n" % (w, h) + arr.astype(np.uint8).tobytes()


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as f:
        return decode_pgm(f.read())


def write_pgm(path: str | os.PathLike, img) -> None:
    with open(path, "wb") as f:
        f.write(encode_pgm(img))
