"""Grayscale image container, PGM codec, padding and quantization."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np


class PGMError(ValueError):
    """Raised for any malformed PGM input."""


class MalformedHeader(PGMError):
    pass


class UnsupportedMaxval(PGMError):
    pass


class TruncatedPayload(PGMError):
    pass


@dataclass(frozen=True, eq=False)
class Image:
    """8-bit grayscale image, row-major with top-left origin.

    ``pixels`` is a ``(height, width)`` uint8 array.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"image must be 2-D, got shape {px.shape}")
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def from_list(cls, width: int, height: int, values) -> "Image":
        values = list(values)
        if len(values) != width * height:
            raise ValueError(f"expected {width * height} pixels, got {len(values)}")
        return cls(np.array(values, dtype=np.int64).reshape(height, width))

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"Image({self.width}x{self.height})"


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise MalformedHeader("PGM header ended early")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def load_pgm(data: bytes) -> Image:
    """Decode binary (P5) or ASCII (P2) PGM with maxval 255."""
    magic, pos = _header_tokens(data, 1)
    if magic[0] not in (b"P5", b"P2"):
        raise MalformedHeader(f"unsupported magic {magic[0]!r}")
    tokens, pos = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise MalformedHeader("non-integer dimension or maxval") from None
    if width <= 0 or height <= 0:
        raise MalformedHeader(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval must be 255, got {maxval}")
    n = width * height

    if magic[0] == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        if data[pos : pos + 1].isspace():
            pos += 1
        payload = data[pos : pos + n]
        if len(payload) < n:
            raise TruncatedPayload(f"expected {n} payload bytes, got {len(payload)}")
        px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
        return Image(px.copy())

    fields = data[pos:].split()
    if len(fields) < n:
        raise TruncatedPayload(f"expected {n} samples, got {len(fields)}")
    try:
        values = np.array([int(f) for f in fields[:n]], dtype=np.int64)
    except ValueError:
        raise MalformedHeader("non-integer sample in ASCII raster") from None
    if values.min() < 0 or values.max() > 255:
        raise PGMError("sample outside [0, 255]")
    return Image(values.reshape(height, width))


def save_pgm(img: Image) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def read_pgm(path) -> Image:
    with open(path, "rb") as fh:
        return load_pgm(fh.read())


def write_pgm(path, img: Image) -> None:
    with open(path, "wb") as fh:
        fh.write(save_pgm(img))


def next_pow2(n: int) -> int:
    return 1 << max(n - 1, 0).bit_length()


def pad_to_square_pow2(img: Image) -> Image:
    """Zero-pad bottom/right to the smallest power-of-two square."""
    side = next_pow2(max(img.width, img.height))
    if img.width == side and img.height == side:
        return img
    out = np.zeros((side, side), dtype=np.uint8)
    out[: img.height, : img.width] = img.pixels
    return Image(out)


def round_half_away(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def quantize(values) -> Image:
    """Round half away from zero, then clamp to [0, 255]."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("quantize expects a 2-D matrix")
    if not np.all(np.isfinite(values)):
        raise ValueError("cannot quantize non-finite values")
    return Image(np.clip(round_half_away(values), 0, 255).astype(np.uint8))
