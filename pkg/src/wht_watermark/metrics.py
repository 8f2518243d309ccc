from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# detection threshold on |rho| for summary reports
DETECTION_THRESHOLD = 0.7


class UndefinedCorrelation(ValueError):
    """Both sequences are constant, so the correlation has no value."""


def correlation(w, v) -> float:
    """Pearson correlation between two singular-value sequences."""
    w = np.asarray(w, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if w.shape != v.shape:
        raise ValueError(f"length mismatch: {w.size} vs {v.size}")
    if w.size < 2:
        raise ValueError("correlation needs at least two samples")
    dw = w - w.mean()
    dv = v - v.mean()
    nw = math.sqrt(float(dw @ dw))
    nv = math.sqrt(float(dv @ dv))
    if nw == 0.0 or nv == 0.0:
        raise UndefinedCorrelation("correlation is undefined for a constant sequence")
    rho = float(dw @ dv) / (nw * nv)
    return min(1.0, max(-1.0, rho))


def psnr(a, b) -> float:
    """10 log10(255^2 / MSE); ``math.inf`` for identical images."""
    pa = np.asarray(getattr(a, "pixels", a), dtype=np.float64)
    pb = np.asarray(getattr(b, "pixels", b), dtype=np.float64)
    if pa.shape != pb.shape:
        raise ValueError(f"dimension mismatch: {pa.shape} vs {pb.shape}")
    mse = float(np.mean((pa - pb) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def is_detected(*rhos) -> bool:
    return any(r is not None and abs(r) >= DETECTION_THRESHOLD for r in rhos)


@dataclass(frozen=True)
class QualityReport:
    psnr: float
    rho_fine: float | None
    rho_coarse: float | None

    @property
    def detected(self) -> bool:
        return is_detected(self.rho_fine, self.rho_coarse)


def format_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6f}"


def format_rho(value: float | None) -> str:
    return "undefined" if value is None else f"{value:.6f}"
