"""Deterministic attack battery for robustness evaluation.

Every attack maps an image to an image of the same size. Stochastic kinds
draw from :class:`~wht_watermark.prng.SplitMix64` and require a seed.

Parameter conventions (the originals are not quantified anywhere):

* ``gaussian_noise percent=P``: additive N(0, s^2) with s = 25.5 * P / 100.
* ``salt_pepper percent=P``: each pixel hit with probability 0.1 * P / 100,
  then set to 0 or 255 with equal odds.
* ``gaussian_blur``: separable fixed-point kernel, symmetric borders; the
  default sigma for ``ksize`` k is 0.3 * ((k - 1) / 2 - 1) + 0.8.
* ``sharpen amount=a``: f + a * (f - blur3x3(f)).
* ``jpeg quality=q``: 8x8 DCT quantize/dequantize with the IJG-scaled table.
* ``row_col_delete count=k``: drop k rows and k columns, nearest-neighbour
  resize back.
* ``crop fraction=f``: keep a centered window of side round(n * sqrt(f)),
  zero elsewhere.
* ``warp_spherical strength=s``: radial bulge r -> r ** (1 + s) inside the
  inscribed circle, bilinear sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .image_io import Image, quantize, round_half_away
from .jpeg import jpeg_roundtrip
from .prng import SplitMix64

KERNEL_BITS = 16
KERNEL_ONE = 1 << KERNEL_BITS

STOCHASTIC = frozenset({"gaussian_noise", "salt_pepper", "row_col_delete"})

# kind -> {param: default}
DEFAULTS: dict[str, dict[str, float]] = {
    "gaussian_blur": {"ksize": 13, "sigma": None},
    "gaussian_noise": {"percent": 100.0},
    "salt_pepper": {"percent": 100.0},
    "jpeg": {"quality": 5},
    "row_col_delete": {"count": 20},
    "pixelate": {"block": 4},
    "crop": {"fraction": 0.025},
    "flip_v": {},
    "flip_h": {},
    "sharpen": {"amount": 1.0},
    "warp_spherical": {"strength": 0.5},
}
KINDS = tuple(DEFAULTS)

_INT_PARAMS = {"ksize", "quality", "count", "block"}


def default_sigma(ksize: int) -> float:
    return 0.3 * ((ksize - 1) * 0.5 - 1) + 0.8


def _format_value(v) -> str:
    return str(v) if isinstance(v, int) else repr(float(v))


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in DEFAULTS:
            raise ValueError(f"unknown attack kind {self.kind!r}")
        unknown = set(self.params) - set(DEFAULTS[self.kind])
        if unknown:
            raise ValueError(f"{self.kind}: unknown parameter(s) {sorted(unknown)}")
        resolved = dict(DEFAULTS[self.kind])
        resolved.update(self.params)
        for name, value in resolved.items():
            if value is None:
                continue
            if name in _INT_PARAMS:
                if float(value) != int(float(value)):
                    raise ValueError(f"{self.kind}: {name} must be an integer, got {value}")
                resolved[name] = int(float(value))
            else:
                resolved[name] = float(value)
        if self.kind == "gaussian_blur" and resolved["sigma"] is None:
            resolved["sigma"] = default_sigma(resolved["ksize"])
        object.__setattr__(self, "params", resolved)
        if self.kind in STOCHASTIC:
            if self.seed is None:
                raise ValueError(f"{self.kind} is stochastic and needs a seed")
            object.__setattr__(self, "seed", int(self.seed) & (2**64 - 1))
        self._validate()

    def _validate(self):
        p = self.params

        def need(ok, msg):
            if not ok:
                raise ValueError(f"{self.kind}: {msg}")

        if self.kind == "gaussian_blur":
            need(p["ksize"] >= 1 and p["ksize"] % 2 == 1, "ksize must be a positive odd integer")
            need(p["sigma"] > 0, "sigma must be positive")
        elif self.kind in ("gaussian_noise", "salt_pepper"):
            need(0 <= p["percent"] <= 100, "percent must be in [0, 100]")
        elif self.kind == "jpeg":
            need(1 <= p["quality"] <= 100, "quality must be in [1, 100]")
        elif self.kind == "row_col_delete":
            need(p["count"] >= 0, "count must be nonnegative")
        elif self.kind == "pixelate":
            need(p["block"] >= 1, "block must be >= 1")
        elif self.kind == "crop":
            need(0 < p["fraction"] <= 1, "fraction must be in (0, 1]")
        elif self.kind == "sharpen":
            need(p["amount"] >= 0, "amount must be nonnegative")
        elif self.kind == "warp_spherical":
            need(0 <= p["strength"] <= 1, "strength must be in [0, 1]")

    def param_string(self) -> str:
        return " ".join(f"{k}={_format_value(v)}" for k, v in self.params.items())

    def to_config(self) -> str:
        lines = ["[attack]", f"kind = {self.kind}"]
        lines += [f"{k} = {_format_value(v)}" for k, v in self.params.items()]
        if self.seed is not None:
            lines.append(f"seed = {self.seed}")
        return "\n".join(lines) + "\n"


# fixed-point kernels


def gaussian_taps(ksize: int, sigma: float) -> np.ndarray:
    """Integer 1-D Gaussian taps summing to exactly 2**16."""
    half = ksize // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x**2) / (2.0 * sigma**2))
    taps = np.floor(g / g.sum() * KERNEL_ONE + 0.5).astype(np.int64)
    taps[half] += KERNEL_ONE - taps.sum()
    return taps


def _convolve_fixed(px: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Separable convolution with symmetric borders; result scaled by 2**32."""
    half = taps.size // 2
    padded = np.pad(px.astype(np.int64), half, mode="symmetric")
    h, w = px.shape
    rows = np.zeros((padded.shape[0], w), dtype=np.int64)
    for t, wt in enumerate(taps):
        rows += wt * padded[:, t : t + w]
    acc = np.zeros((h, w), dtype=np.int64)
    for t, wt in enumerate(taps):
        acc += wt * rows[t : t + h, :]
    return acc


def gaussian_blur(img: Image, ksize: int, sigma: float) -> Image:
    acc = _convolve_fixed(img.pixels, gaussian_taps(ksize, sigma))
    out = (acc + (1 << (2 * KERNEL_BITS - 1))) >> (2 * KERNEL_BITS)
    return Image(np.clip(out, 0, 255))


def sharpen(img: Image, amount: float) -> Image:
    acc = _convolve_fixed(img.pixels, gaussian_taps(3, default_sigma(3)))
    blurred = acc.astype(np.float64) / float(1 << (2 * KERNEL_BITS))
    f = img.pixels.astype(np.float64)
    return quantize(f + amount * (f - blurred))


def gaussian_noise(img: Image, percent: float, seed: int) -> Image:
    sd = 25.5 * percent / 100.0
    noise = SplitMix64(seed).normal(img.pixels.size).reshape(img.pixels.shape)
    return quantize(img.pixels.astype(np.float64) + sd * noise)


def salt_pepper(img: Image, percent: float, seed: int) -> Image:
    density = 0.1 * percent / 100.0
    n = img.pixels.size
    rng = SplitMix64(seed)
    hit = (rng.uniform(n) < density).reshape(img.pixels.shape)
    salt = (rng.uniform(n) < 0.5).reshape(img.pixels.shape)
    out = img.pixels.copy()
    out[hit & salt] = 255
    out[hit & ~salt] = 0
    return Image(out)


def _nearest_index(dst_len: int, src_len: int) -> np.ndarray:
    d = np.arange(dst_len, dtype=np.int64)
    return ((2 * d + 1) * src_len) // (2 * dst_len)


def row_col_delete(img: Image, count: int, seed: int) -> Image:
    h, w = img.pixels.shape
    if count >= min(h, w):
        raise ValueError(f"row_col_delete: cannot delete {count} rows/columns from {w}x{h}")
    rng = SplitMix64(seed)
    drop_rows = rng.choice(h, count)
    drop_cols = rng.choice(w, count)
    kept = np.delete(np.delete(img.pixels, drop_rows, axis=0), drop_cols, axis=1)
    rows = _nearest_index(h, kept.shape[0])
    cols = _nearest_index(w, kept.shape[1])
    return Image(kept[np.ix_(rows, cols)])


def pixelate(img: Image, block: int) -> Image:
    px = img.pixels.astype(np.float64)
    h, w = px.shape
    ys, xs = np.arange(0, h, block), np.arange(0, w, block)
    sums = np.add.reduceat(np.add.reduceat(px, ys, axis=0), xs, axis=1)
    heights = np.diff(np.append(ys, h))
    widths = np.diff(np.append(xs, w))
    means = sums / np.outer(heights, widths)
    out = np.repeat(np.repeat(means, heights, axis=0), widths, axis=1)
    return quantize(out)


def crop(img: Image, fraction: float) -> Image:
    h, w = img.pixels.shape
    root = math.sqrt(fraction)
    sh = int(round_half_away(h * root))
    sw = int(round_half_away(w * root))
    top, left = (h - sh) // 2, (w - sw) // 2
    out = np.zeros_like(img.pixels)
    out[top : top + sh, left : left + sw] = img.pixels[top : top + sh, left : left + sw]
    return Image(out)


def _bilinear(px: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    h, w = px.shape
    ys = np.clip(ys, 0, h - 1)
    xs = np.clip(xs, 0, w - 1)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = ys - y0
    fx = xs - x0
    top = px[y0, x0] * (1 - fx) + px[y0, x1] * fx
    bottom = px[y1, x0] * (1 - fx) + px[y1, x1] * fx
    return top * (1 - fy) + bottom * fy


def warp_spherical(img: Image, strength: float) -> Image:
    px = img.pixels.astype(np.float64)
    h, w = px.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    radius = min(h, w) / 2.0
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    dy, dx = (yy - cy) / radius, (xx - cx) / radius
    r = np.hypot(dy, dx)
    inside = (r > 0) & (r < 1)
    gain = np.ones_like(r)
    gain[inside] = r[inside] ** strength  # r_src / r = r ** s
    ys = cy + dy * gain * radius
    xs = cx + dx * gain * radius
    return quantize(_bilinear(px, ys, xs))


def apply_attack(img: Image, spec: AttackSpec) -> Image:
    p = spec.params
    kind = spec.kind
    if kind == "gaussian_blur":
        out = gaussian_blur(img, p["ksize"], p["sigma"])
    elif kind == "gaussian_noise":
        out = gaussian_noise(img, p["percent"], spec.seed)
    elif kind == "salt_pepper":
        out = salt_pepper(img, p["percent"], spec.seed)
    elif kind == "jpeg":
        out = jpeg_roundtrip(img, p["quality"])
    elif kind == "row_col_delete":
        out = row_col_delete(img, p["count"], spec.seed)
    elif kind == "pixelate":
        out = pixelate(img, p["block"])
    elif kind == "crop":
        out = crop(img, p["fraction"])
    elif kind == "flip_v":
        out = Image(img.pixels[::-1, :].copy())
    elif kind == "flip_h":
        out = Image(img.pixels[:, ::-1].copy())
    elif kind == "sharpen":
        out = sharpen(img, p["amount"])
    elif kind == "warp_spherical":
        out = warp_spherical(img, p["strength"])
    else:  # pragma: no cover - AttackSpec rejects unknown kinds
        raise ValueError(kind)
    assert out.pixels.shape == img.pixels.shape
    return out


def default_suite(seed: int = 1) -> list[AttackSpec]:
    """One entry per attack in the reference battery, with default settings."""
    return [AttackSpec(kind, seed=seed if kind in STOCHASTIC else None) for kind in KINDS]
