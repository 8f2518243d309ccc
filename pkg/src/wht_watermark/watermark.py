"""Non-blind MR-WHT/SVD watermark embedding and extraction, plus key files.

The watermark's singular values are added to a middle slice of the HH
singular values at the finest (level 1) and coarsest (deepest) level:

    sigma_new[i + p] = sigma[i + p] + alpha * sigma_W[i] / max(sigma)

Extraction inverts this against the host's HH spectrum. Both formulas are
evaluated on sub-bands expressed in 1/N-normalized WHT units (see
``Pyramid.scale``); the integer canvas is only a storage convention.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .image_io import Image, pad_to_square_pow2, quantize
from .metrics import UndefinedCorrelation, correlation, is_detected
from .mrwht import Pyramid, decompose, level_side, reconstruct
from .svd import svd, svd_compose

DEFAULT_ALPHA = 0.05
DEFAULT_LEVELS = 2
DEFAULT_P_COARSE = 63
DEFAULT_P_FINE = 32

# reference for max(sigma) in extraction: the host's HH spectrum
POLICY_HOST_MAX = 0


class CapacityError(ValueError):
    """The watermark spectrum does not fit in a target HH sub-band."""


@dataclass(frozen=True)
class EmbedParams:
    alpha: float = DEFAULT_ALPHA
    levels: int = DEFAULT_LEVELS
    p_coarse: int = DEFAULT_P_COARSE
    p_fine: int = DEFAULT_P_FINE

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be a finite nonnegative number, got {self.alpha}")
        if self.levels < 2:
            raise ValueError("levels must be >= 2 so the finest and coarsest HH differ")
        if self.p_coarse < 0 or self.p_fine < 0:
            raise ValueError("offsets must be nonnegative")

    def targets(self) -> list[tuple[str, int, int]]:
        """(name, level, offset) per embedding site, coarsest first."""
        return [("coarse", self.levels, self.p_coarse), ("fine", 1, self.p_fine)]


@dataclass(frozen=True, eq=False)
class WatermarkKey:
    U_w: np.ndarray
    V_w: np.ndarray
    sigma_w: np.ndarray
    alpha: float
    levels: int
    p_coarse: int
    p_fine: int
    host_width: int
    host_height: int
    policy: int = POLICY_HOST_MAX

    @property
    def wm_height(self) -> int:
        return self.U_w.shape[0]

    @property
    def wm_width(self) -> int:
        return self.V_w.shape[0]

    @property
    def params(self) -> EmbedParams:
        return EmbedParams(self.alpha, self.levels, self.p_coarse, self.p_fine)

    def __eq__(self, other):
        if not isinstance(other, WatermarkKey):
            return NotImplemented
        return key_save(self) == key_save(other)


@dataclass(frozen=True)
class LevelExtraction:
    sigma: np.ndarray
    watermark: np.ndarray
    rho: float | None  # None when the extracted spectrum is constant

    def image(self) -> Image:
        """Extracted watermark clamped to displayable pixels."""
        return quantize(self.watermark)


@dataclass(frozen=True)
class ExtractionResult:
    fine: LevelExtraction
    coarse: LevelExtraction

    @property
    def detected(self) -> bool:
        return is_detected(self.fine.rho, self.coarse.rho)


def _band_name(level: int) -> str:
    return f"HH{level}"


def check_capacity(side: int, wm_shape: tuple[int, int], params: EmbedParams) -> None:
    r = min(wm_shape)
    if side < 2**params.levels:
        raise ValueError(f"host side {side} too small for {params.levels} levels")
    for _, level, p in params.targets():
        hh = level_side(side, level) // 2
        if max(wm_shape) > hh:
            raise CapacityError(
                f"{wm_shape[1]}x{wm_shape[0]} watermark is larger than {_band_name(level)} ({hh}x{hh})"
            )
        if p + r > hh:
            raise CapacityError(
                f"{_band_name(level)} has {hh} singular values; offset {p} + {r} watermark values exceeds it"
            )


def _normalized_hh(pyr: Pyramid, level: int) -> np.ndarray:
    return np.asarray(pyr.band(level, "HH"), dtype=np.float64) / pyr.scale(level)


def embed_pyramid(pyr: Pyramid, sigma_w, params: EmbedParams) -> Pyramid:
    """Add the watermark spectrum to both HH targets of a decomposed host."""
    sigma_w = np.asarray(sigma_w, dtype=np.float64)
    r = sigma_w.size
    for _, level, p in params.targets():
        band = _normalized_hh(pyr, level)
        f = svd(band)
        top = f.S[0]
        if top == 0.0:
            raise ValueError(f"{_band_name(level)} is identically zero; nothing to embed into")
        s = f.S.copy()
        s[p : p + r] += params.alpha * sigma_w / top
        pyr = pyr.with_band(level, "HH", svd_compose(f.U, s, f.V) * pyr.scale(level))
    return pyr


def extract_pyramids(host: Pyramid, marked: Pyramid, key: WatermarkKey) -> ExtractionResult:
    """Recover the watermark spectrum from decomposed host and marked images."""
    if key.alpha == 0:
        raise ValueError("key has alpha = 0; the watermark spectrum cannot be recovered")
    if host.side != marked.side or host.levels != marked.levels:
        raise ValueError("host and marked pyramids differ in size or depth")
    if host.levels != key.levels:
        raise ValueError(f"key expects {key.levels} levels, pyramids have {host.levels}")
    check_capacity(host.side, (key.wm_height, key.wm_width), key.params)

    r = key.sigma_w.size
    out = {}
    for name, level, p in key.params.targets():
        s_host = svd(_normalized_hh(host, level)).S
        s_marked = svd(_normalized_hh(marked, level)).S
        top = s_host[0]
        sigma = (s_marked[p : p + r] - s_host[p : p + r]) * top / key.alpha
        try:
            rho = correlation(key.sigma_w, sigma)
        except UndefinedCorrelation:
            rho = None
        out[name] = LevelExtraction(sigma, svd_compose(key.U_w, sigma, key.V_w), rho)
    return ExtractionResult(**out)


def _prepare_host(host: Image) -> Image:
    return pad_to_square_pow2(host)


def embed(host: Image, wm: Image, params: EmbedParams | None = None) -> tuple[Image, WatermarkKey]:
    """Watermark ``host`` with ``wm``; returns the marked image and its key.

    Non-square or non-power-of-two hosts are zero-padded bottom/right and
    the marked image keeps the padded canvas. The original size goes in
    the key.
    """
    params = params or EmbedParams()
    canvas = _prepare_host(host)
    check_capacity(canvas.width, (wm.height, wm.width), params)

    fw = svd(wm.pixels)
    pyr = decompose(canvas, params.levels)
    marked = quantize(reconstruct(embed_pyramid(pyr, fw.S, params)))
    key = WatermarkKey(
        U_w=fw.U,
        V_w=fw.V,
        sigma_w=fw.S,
        alpha=float(params.alpha),
        levels=params.levels,
        p_coarse=params.p_coarse,
        p_fine=params.p_fine,
        host_width=host.width,
        host_height=host.height,
    )
    return marked, key


def extract(host: Image, marked: Image, key: WatermarkKey) -> ExtractionResult:
    host = _prepare_host(host)
    marked = _prepare_host(marked)
    if (host.width, host.height) != (marked.width, marked.height):
        raise ValueError(
            f"host canvas {host.width}x{host.height} and marked canvas "
            f"{marked.width}x{marked.height} differ"
        )
    return extract_pyramids(decompose(host, key.levels), decompose(marked, key.levels), key)


# key file: little-endian header, float64 arrays, trailing CRC-32

KEY_MAGIC = b"MRWK"
KEY_VERSION = 1
_HEADER = struct.Struct("<4sHBBIIIIIId")
_CRC = struct.Struct("<I")


class KeyFormatError(ValueError):
    pass


class BadMagic(KeyFormatError):
    pass


class VersionMismatch(KeyFormatError):
    pass


class ChecksumError(KeyFormatError):
    pass


def key_save(key: WatermarkKey) -> bytes:
    header = _HEADER.pack(
        KEY_MAGIC,
        KEY_VERSION,
        key.policy,
        key.levels,
        key.p_coarse,
        key.p_fine,
        key.wm_height,
        key.wm_width,
        key.host_height,
        key.host_width,
        key.alpha,
    )
    body = b"".join(
        np.ascontiguousarray(a, dtype="<f8").tobytes() for a in (key.sigma_w, key.U_w, key.V_w)
    )
    payload = header + body
    return payload + _CRC.pack(zlib.crc32(payload))


def key_load(data: bytes) -> WatermarkKey:
    if len(data) < 4 or data[:4] != KEY_MAGIC:
        raise BadMagic("not a watermark key file")
    if len(data) < _HEADER.size + _CRC.size:
        raise ChecksumError("key file truncated")
    payload, (crc,) = data[: -_CRC.size], _CRC.unpack(data[-_CRC.size :])
    (_, version, policy, levels, p_coarse, p_fine, m, n, hh, hw, alpha) = _HEADER.unpack_from(payload)
    if version != KEY_VERSION:
        raise VersionMismatch(f"key version {version}, expected {KEY_VERSION}")
    r = min(m, n)
    expected = _HEADER.size + 8 * (r + m * m + n * n)
    if len(payload) != expected:
        raise ChecksumError(f"key payload is {len(payload)} bytes, expected {expected}")
    if zlib.crc32(payload) != crc:
        raise ChecksumError("key checksum mismatch")
    if policy != POLICY_HOST_MAX:
        raise KeyFormatError(f"unknown max-sigma policy {policy}")

    arrays = np.frombuffer(payload, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    sigma_w = arrays[:r].copy()
    U_w = arrays[r : r + m * m].reshape(m, m).copy()
    V_w = arrays[r + m * m :].reshape(n, n).copy()
    for name, q in (("U_w", U_w), ("V_w", V_w)):
        if np.max(np.abs(q.T @ q - np.eye(q.shape[0]))) > 1e-8:
            raise KeyFormatError(f"{name} is not orthogonal")
    return WatermarkKey(U_w, V_w, sigma_w, alpha, levels, p_coarse, p_fine, hw, hh, policy)
