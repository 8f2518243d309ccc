"""Baseline-JPEG-style lossy round trip: 8x8 DCT, scaled luminance table, no entropy coding."""

from __future__ import annotations

import numpy as np

from .image_io import Image, quantize, round_half_away

LUMINANCE_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)


def quality_table(quality: int) -> np.ndarray:
    """IJG quality scaling of the standard luminance table."""
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    table = (LUMINANCE_TABLE * scale + 50) // 100
    return np.clip(table, 1, 255)


def dct_matrix(n: int = 8) -> np.ndarray:
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * x + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    c[0] /= np.sqrt(2.0)
    return c


_DCT8 = dct_matrix(8)


def jpeg_roundtrip(img: Image, quality: int) -> Image:
    q = quality_table(quality).astype(np.float64)
    h, w = img.height, img.width
    ph, pw = -h % 8, -w % 8
    px = np.pad(img.pixels.astype(np.float64), ((0, ph), (0, pw)), mode="edge") - 128.0
    H, W = px.shape
    # (by, 8, bx, 8) -> (by, bx, 8, 8)
    blocks = px.reshape(H // 8, 8, W // 8, 8).transpose(0, 2, 1, 3)
    coefs = _DCT8 @ blocks @ _DCT8.T
    coefs = round_half_away(coefs / q) * q
    blocks = _DCT8.T @ coefs @ _DCT8
    out = blocks.transpose(0, 2, 1, 3).reshape(H, W)[:h, :w] + 128.0
    return quantize(out)
