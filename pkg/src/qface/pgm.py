"""8-bit PGM images and their key=value sidecar files."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import ImageReadError

_TOKEN = re.compile(rb"#[^\n]*\n?|\s+|(\S+)")


def _header(data: bytes):
    """Yield (token, end offset) for the ASCII header fields, skipping comments."""
    pos = 0
    while pos < len(data):
        m = _TOKEN.match(data, pos)
        pos = m.end()
        if m.group(1) is not None:
            yield m.group(1), pos


def read_pgm(path) -> np.ndarray:
    """Read a P5 (binary) or P2 (ASCII) greymap with maxval <= 255 as uint8."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ImageReadError(f"cannot read {path}: {exc}") from exc
    tokens = _header(data)
    try:
        magic, _ = next(tokens)
        width, _ = next(tokens)
        height, _ = next(tokens)
        maxval, end = next(tokens)
        w, h, mv = int(width), int(height), int(maxval)
    except (StopIteration, ValueError) as exc:
        raise ImageReadError(f"{path}: malformed PGM header") from exc
    if not 0 < mv <= 255:
        raise ImageReadError(f"{path}: only 8-bit PGM is supported (maxval {mv})")
    if magic == b"P5":
        start = end + 1  # exactly one whitespace byte separates header and raster
        raster = data[start:start + w * h]
        if len(raster) != w * h:
            raise ImageReadError(f"{path}: truncated raster")
        pixels = np.frombuffer(raster, dtype=np.uint8).reshape(h, w)
    elif magic == b"P2":
        try:
            values = [int(tok) for tok, _ in tokens][: w * h]
        except ValueError as exc:
            raise ImageReadError(f"{path}: non-integer pixel") from exc
        if len(values) != w * h:
            raise ImageReadError(f"{path}: truncated raster")
        pixels = np.array(values, dtype=np.int64).reshape(h, w)
    else:
        raise ImageReadError(f"{path}: not a PGM file (magic {magic!r})")
    if np.any(pixels > mv):
        raise ImageReadError(f"{path}: pixel exceeds maxval")
    if mv != 255:
        pixels = np.rint(pixels.astype(np.float64) * 255.0 / mv)
    return np.asarray(pixels, dtype=np.uint8).copy()


def write_pgm(path, pixels) -> Path:
    """Write a 2-D uint8 array (or floats in [0, 1]) as binary P5."""
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise ValueError("PGM needs a 2-D array")
    if arr.dtype != np.uint8:
        arr = to_uint8(arr)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    h, w = arr.shape
    path.write_bytes(b"P5\n%d %d\n255\n" % (w, h) + arr.tobytes())
    return path


def to_uint8(values) -> np.ndarray:
    return np.rint(np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def write_sidecar(path, fields: dict) -> Path:
    path = Path(path)
    path.write_text("".join(f"{k}={v}\n" for k, v in fields.items()))
    return path


def read_sidecar(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out
