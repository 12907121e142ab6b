"""Grayscale image container and PGM/PNG codecs."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, PgmParseError

_WS = b" \t\n\r\v\f"
_TOKEN = re.compile(rb"\S+")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image. ``pixels`` is a read-only (height, width) uint8 array, row-major, top-left origin."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise InvalidParameterError(f"pixels must be a non-empty 2-D array, got shape {px.shape}")
        if px.dtype != np.uint8:
            if not np.issubdtype(px.dtype, np.number) or px.min() < 0 or px.max() > 255:
                raise InvalidParameterError("pixel intensities must lie in [0, 255]")
            if np.issubdtype(px.dtype, np.floating) and not np.array_equal(px, np.round(px)):
                raise InvalidParameterError("pixel intensities must be integers")
        px = np.array(px, dtype=np.uint8, order="C", copy=True)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


def _skip_ws_and_comments(data, pos):
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            eol = data.find(b"\n", pos)
            pos = n if eol < 0 else eol + 1
        elif data[pos] in _WS:
            pos += 1
        else:
            break
    return pos


def _header_int(data, pos, what):
    pos = _skip_ws_and_comments(data, pos)
    start = pos
    while pos < len(data) and data[pos] not in _WS and data[pos:pos + 1] != b"#":
        pos += 1
    tok = data[start:pos]
    if not tok:
        raise PgmParseError(f"missing {what} in header", start)
    if not tok.isdigit():
        raise PgmParseError(f"invalid {what} {tok[:16]!r} in header", start)
    return int(tok), start, pos


def parse_pgm(data: bytes) -> GrayImage:
    """Decode a P2 (ASCII) or P5 (binary) PGM with maxval <= 255.

    Images with a maxval below 255 are rescaled to the full 0..255 range.
    """
    magic = data[:2]
    if magic in (b"P1", b"P3", b"P4", b"P6", b"P7"):
        raise PgmParseError(f"magic {magic.decode()} is not a graymap (only P2/P5 are supported)", 0)
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(f"bad magic number {magic!r}", 0)
    if len(data) < 3 or data[2] not in _WS:
        raise PgmParseError("expected whitespace after magic number", 2)
    width, off, pos = _header_int(data, 2, "width")
    if width < 1:
        raise PgmParseError("width must be positive", off)
    height, off, pos = _header_int(data, pos, "height")
    if height < 1:
        raise PgmParseError("height must be positive", off)
    maxval, off, pos = _header_int(data, pos, "maxval")
    if maxval < 1:
        raise PgmParseError("maxval must be positive", off)
    if maxval > 255:
        raise PgmParseError(f"maxval {maxval} (16-bit PGM) is not supported", off)
    if pos >= len(data) or data[pos] not in _WS:
        raise PgmParseError("expected whitespace after maxval", pos)
    count = width * height

    if magic == b"P5":
        start = pos + 1
        raw = data[start:start + count]
        if len(raw) < count:
            raise PgmParseError(f"truncated payload: expected {count} bytes, got {len(raw)}", len(data))
        vals = np.frombuffer(raw, dtype=np.uint8).astype(np.int64)
        bad = np.flatnonzero(vals > maxval)
        if bad.size:
            raise PgmParseError(f"sample {vals[bad[0]]} exceeds maxval {maxval}", start + int(bad[0]))
    else:
        vals = np.empty(count, dtype=np.int64)
        i = 0
        for m in _TOKEN.finditer(data, pos):
            if i == count:
                break
            tok = m.group()
            if not tok.isdigit():
                raise PgmParseError(f"invalid sample {tok[:16]!r}", m.start())
            v = int(tok)
            if v > maxval:
                raise PgmParseError(f"sample {v} exceeds maxval {maxval}", m.start())
            vals[i] = v
            i += 1
        if i < count:
            raise PgmParseError(f"truncated payload: expected {count} samples, got {i}", len(data))

    if maxval != 255:
        vals = (vals * 255 + maxval // 2) // maxval
    return GrayImage(vals.reshape(height, width).astype(np.uint8))


def load_pgm(path) -> GrayImage:
    return parse_pgm(Path(path).read_bytes())


def encode_pgm(image: GrayImage) -> bytes:
    """Binary (P5) encoding with maxval 255."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels.tobytes()


def save_pgm(image: GrayImage, path) -> None:
    path = Path(path)
    try:
        path.write_bytes(encode_pgm(image))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def load_png(path) -> GrayImage:
    """Decode any Pillow-readable image; color is reduced to (r + g + b) / 3."""
    from PIL import Image

    with Image.open(path) as im:
        if im.mode == "P":
            im = im.convert("RGBA" if "transparency" in im.info else "RGB")
        if im.mode in ("1", "L"):
            arr = np.asarray(im.convert("L"), dtype=np.uint8)
        elif im.mode == "LA":
            arr = np.asarray(im, dtype=np.uint8)[..., 0]
        elif im.mode in ("RGB", "RGBA"):
            rgb = np.asarray(im, dtype=np.int64)[..., :3]
            arr = ((rgb.sum(axis=-1) + 1) // 3).astype(np.uint8)
        elif im.mode in ("I;16", "I;16B", "I;16L", "I"):
            arr = (np.asarray(im, dtype=np.int64) >> 8).clip(0, 255).astype(np.uint8)
        else:
            raise InvalidParameterError(f"{path}: unsupported image mode {im.mode}")
    return GrayImage(arr)


def load_image(path) -> GrayImage:
    """Load a PGM natively, anything else through Pillow."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head in (b"P2", b"P5"):
        return load_pgm(path)
    return load_png(path)
