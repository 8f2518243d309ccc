"""Attack-suite evaluation and its CSV report."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .attacks import apply_attack
from .image_io import Image, pad_to_square_pow2
from .metrics import format_psnr, format_rho, is_detected, psnr
from .mrwht import decompose
from .suite import SuiteEntry
from .watermark import EmbedParams, WatermarkKey, embed, extract_pyramids

log = logging.getLogger(__name__)

COLUMNS = ("attack", "params", "seed", "psnr_attacked", "rho_fine", "rho_coarse", "detected")
HEADER_KEYS = ("host", "watermark", "alpha", "levels", "p_coarse", "p_fine", "psnr_marked")


@dataclass
class EvalReport:
    header: dict = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in HEADER_KEYS:
            if key in self.header:
                buf.write(f"# {key}={self.header[key]}\n")
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "EvalReport":
        header = {}
        body = []
        for line in text.splitlines(keepends=True):
            if line.startswith("# ") and "=" in line and not body:
                key, value = line[2:].rstrip("\n").split("=", 1)
                header[key] = value
            else:
                body.append(line)
        reader = csv.DictReader(body)
        if reader.fieldnames is not None and tuple(reader.fieldnames) != COLUMNS:
            raise ValueError(f"unexpected CSV columns {reader.fieldnames}")
        return cls(header, [dict(r) for r in reader])


def _row(entry: SuiteEntry, marked: Image, host_pyr, key: WatermarkKey) -> dict:
    spec = entry.spec
    row = {
        "attack": entry.name,
        "params": spec.param_string(),
        "seed": "" if spec.seed is None else str(spec.seed),
    }
    try:
        attacked = apply_attack(marked, spec)
        result = extract_pyramids(host_pyr, decompose(attacked, key.levels), key)
    except Exception as exc:  # recorded per row; the run continues
        log.error("attack %s failed: %s", entry.name, exc)
        row.update(psnr_attacked="error", rho_fine="error", rho_coarse="error", detected="error")
        return row
    row.update(
        psnr_attacked=format_psnr(psnr(marked, attacked)),
        rho_fine=format_rho(result.fine.rho),
        rho_coarse=format_rho(result.coarse.rho),
        detected="yes" if is_detected(result.fine.rho, result.coarse.rho) else "no",
    )
    return row


def evaluate(
    host: Image,
    wm: Image,
    entries: list[SuiteEntry],
    params: EmbedParams | None = None,
    host_name: str = "host",
    wm_name: str = "watermark",
    jobs: int = 1,
) -> EvalReport:
    """Embed once, then attack and extract once per suite entry.

    Rows follow ``entries`` order whatever ``jobs`` is.
    """
    params = params or EmbedParams()
    marked, key = embed(host, wm, params)
    canvas = pad_to_square_pow2(host)
    host_pyr = decompose(canvas, params.levels)
    header = {
        "host": host_name,
        "watermark": wm_name,
        "alpha": repr(float(params.alpha)),
        "levels": params.levels,
        "p_coarse": params.p_coarse,
        "p_fine": params.p_fine,
        "psnr_marked": format_psnr(psnr(canvas, marked)),
    }
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda e: _row(e, marked, host_pyr, key), entries))
    else:
        rows = [_row(e, marked, host_pyr, key) for e in entries]
    return EvalReport(header, rows)
