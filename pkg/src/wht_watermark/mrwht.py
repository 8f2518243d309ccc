"""Multiresolution WHT: WHT followed by floor-lifting along rows then columns.

Each level transforms the current LL block in place, so the canvas ends up
with the usual pyramid layout: LL top-left, LH top-right, HL bottom-left,
HH bottom-right of every level's quadrant split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .wht import is_pow2, wht_forward_2d, wht_inverse_2d

BANDS = ("LL", "LH", "HL", "HH")

# |coefficients| must stay below this for int64 arithmetic to be exact
_INT64_SAFE = 2**62


def _floor_half(a):
    if a.dtype == np.float64:
        return np.floor(a / 2)
    return a // 2


def _check_even(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] % 2 or m.shape[1] % 2:
        raise ValueError(f"lifting needs even width and height, got shape {m.shape}")


def _lift_rows(m):
    # pairs of adjacent columns -> floor-average left half, difference right half
    a, b = m[:, 0::2], m[:, 1::2]
    return np.concatenate((_floor_half(a + b), a - b), axis=1)


def _unlift_rows(m):
    w = m.shape[1] // 2
    avg, diff = m[:, :w], m[:, w:]
    first = avg + _floor_half(diff + 1)
    second = first - diff
    out = np.empty_like(m)
    out[:, 0::2] = first
    out[:, 1::2] = second
    return out


def lift_forward(m) -> np.ndarray:
    """Row-wise then column-wise average/difference lifting."""
    m = np.asarray(m)
    _check_even(m)
    m = _lift_rows(m)
    return _lift_rows(m.T).T.copy()


def lift_inverse(m) -> np.ndarray:
    """Undo the column step, then the row step.

    Exact inverse of :func:`lift_forward` on integer matrices; on real
    input the floors are the mathematical floor.
    """
    m = np.asarray(m)
    _check_even(m)
    m = _unlift_rows(m.T).T
    return _unlift_rows(m)


def level_side(side: int, level: int) -> int:
    """Side of the block that level ``level`` (1-based) transforms."""
    return side >> (level - 1)


def level_scale(side: int, level: int) -> int:
    """Gain of our unnormalized level-``level`` coefficients over the 1/N-normalized WHT.

    Every level's forward WHT multiplies by ``n**2`` relative to the
    normalized transform, and deeper levels inherit the gain of the LL
    block they were computed from.
    """
    scale = 1
    for k in range(1, level + 1):
        scale *= level_side(side, k) ** 2
    return scale


@dataclass(frozen=True)
class Pyramid:
    """L-level decomposition stored on a single canvas."""

    canvas: np.ndarray
    levels: int

    @property
    def side(self) -> int:
        return self.canvas.shape[0]

    def band_slice(self, level: int, band: str) -> tuple[slice, slice]:
        if not 1 <= level <= self.levels:
            raise ValueError(f"level must be in [1, {self.levels}], got {level}")
        if band not in BANDS:
            raise ValueError(f"unknown sub-band {band!r}")
        n = level_side(self.side, level)
        h = n // 2
        rows = slice(0, h) if band in ("LL", "LH") else slice(h, n)
        cols = slice(0, h) if band in ("LL", "HL") else slice(h, n)
        return rows, cols

    def band(self, level: int, band: str) -> np.ndarray:
        """Read-only view of sub-band ``band`` at ``level``."""
        view = self.canvas[self.band_slice(level, band)]
        view = view.view()
        view.flags.writeable = False
        return view

    def scale(self, level: int) -> int:
        return level_scale(self.side, level)

    def with_band(self, level: int, band: str, values) -> "Pyramid":
        """Copy of this pyramid with one sub-band replaced (promotes to float)."""
        values = np.asarray(values, dtype=np.float64)
        rows, cols = self.band_slice(level, band)
        canvas = np.array(self.canvas, dtype=np.float64)
        if values.shape != canvas[rows, cols].shape:
            raise ValueError(f"sub-band shape mismatch: {values.shape} vs {canvas[rows, cols].shape}")
        canvas[rows, cols] = values
        return Pyramid(canvas, self.levels)


def _coefficient_bound(side: int, levels: int) -> int:
    # pixel 255, forward WHT gains n^2 per level, differences at most double twice
    bound = 255
    for k in range(1, levels + 1):
        bound *= level_side(side, k) ** 2
    return bound * 4


def decompose(img, levels: int = 2) -> Pyramid:
    """L-level MR-WHT of a square power-of-two image.

    Level 1 is WHT plus lifting of the whole canvas; every further level
    repeats both steps on the previous level's LL block.
    """
    pixels = img.pixels if hasattr(img, "pixels") else np.asarray(img)
    if pixels.ndim != 2 or pixels.shape[0] != pixels.shape[1]:
        raise ValueError(f"decompose needs a square image, got shape {pixels.shape}")
    side = pixels.shape[0]
    if not is_pow2(side):
        raise ValueError(f"image side must be a power of two, got {side}")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if side < 2**levels:
        raise ValueError(f"side {side} too small for {levels} levels")

    if pixels.dtype.kind == "f":
        canvas = pixels.astype(np.float64)
    elif _coefficient_bound(side, levels) < _INT64_SAFE:
        canvas = pixels.astype(np.int64)
    else:
        canvas = pixels.astype(object)

    canvas = canvas.copy()
    for level in range(1, levels + 1):
        n = level_side(side, level)
        canvas[:n, :n] = lift_forward(wht_forward_2d(canvas[:n, :n]))
    return Pyramid(canvas, levels)


def reconstruct(p: Pyramid) -> np.ndarray:
    """Inverse MR-WHT, deepest level first.

    Integer pyramids reconstruct exactly; modified (float) pyramids give a
    real matrix that the caller quantizes.
    """
    canvas = p.canvas.copy()
    for level in range(p.levels, 0, -1):
        n = level_side(p.side, level)
        canvas[:n, :n] = wht_inverse_2d(lift_inverse(canvas[:n, :n]))
    return canvas
