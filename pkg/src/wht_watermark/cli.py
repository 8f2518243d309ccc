"""Command-line front end: embed, extract, attack, evaluate."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .attacks import KINDS, AttackSpec, apply_attack
from .image_io import PGMError, pad_to_square_pow2, read_pgm, write_pgm
from .metrics import format_psnr, format_rho, psnr
from .report import evaluate
from .suite import SuiteError, read_suite
from .watermark import (
    DEFAULT_ALPHA,
    DEFAULT_LEVELS,
    DEFAULT_P_COARSE,
    DEFAULT_P_FINE,
    CapacityError,
    EmbedParams,
    KeyFormatError,
    embed,
    extract,
    key_load,
    key_save,
)

log = logging.getLogger("wht_watermark")


def _add_embed_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=None, help=f"watermark strength (default {DEFAULT_ALPHA})")
    p.add_argument("--levels", type=int, default=None, help=f"MR-WHT depth (default {DEFAULT_LEVELS})")
    p.add_argument("--p-coarse", type=int, default=None, help=f"offset at the deepest level (default {DEFAULT_P_COARSE})")
    p.add_argument("--p-fine", type=int, default=None, help=f"offset at level 1 (default {DEFAULT_P_FINE})")


def _params(args, overrides: dict | None = None) -> EmbedParams:
    values = {"alpha": DEFAULT_ALPHA, "levels": DEFAULT_LEVELS, "p_coarse": DEFAULT_P_COARSE, "p_fine": DEFAULT_P_FINE}
    values.update(overrides or {})
    for name in values:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return EmbedParams(**values)


def cmd_embed(args) -> int:
    host = read_pgm(args.host)
    wm = read_pgm(args.watermark)
    marked, key = embed(host, wm, _params(args))
    write_pgm(args.output, marked)
    Path(args.key).write_bytes(key_save(key))
    print(f"PSNR {format_psnr(psnr(pad_to_square_pow2(host), marked))} dB")
    return 0


def cmd_extract(args) -> int:
    key = key_load(Path(args.key).read_bytes())
    result = extract(read_pgm(args.host), read_pgm(args.marked), key)
    for name in ("fine", "coarse"):
        level = getattr(result, name)
        write_pgm(f"{args.output_prefix}_{name}.pgm", level.image())
        note = "" if level.rho is not None else " (no watermark)"
        print(f"rho_{name} {format_rho(level.rho)}{note}")
    print("watermark detected" if result.detected else "no watermark detected")
    return 0


def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"parameter {pair!r} is not key=value")
        k, v = pair.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_attack(args) -> int:
    spec = AttackSpec(args.kind, _parse_params(args.param), args.seed)
    write_pgm(args.output, apply_attack(read_pgm(args.input), spec))
    return 0


def cmd_evaluate(args) -> int:
    suite = read_suite(args.suite)
    report = evaluate(
        read_pgm(args.host),
        read_pgm(args.watermark),
        suite.entries,
        _params(args, suite.settings),
        host_name=Path(args.host).name,
        wm_name=Path(args.watermark).name,
        jobs=args.jobs,
    )
    text = report.to_csv()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wht-watermark", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="watermark a host image")
    p.add_argument("host")
    p.add_argument("watermark")
    p.add_argument("-o", "--output", required=True, help="watermarked PGM")
    p.add_argument("-k", "--key", required=True, help="key file to write")
    _add_embed_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover the watermark (needs the host)")
    p.add_argument("host")
    p.add_argument("marked")
    p.add_argument("-k", "--key", required=True)
    p.add_argument("-o", "--output-prefix", required=True, help="writes PREFIX_fine.pgm and PREFIX_coarse.pgm")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="apply one attack to an image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("evaluate", help="embed once, run an attack suite, emit CSV")
    p.add_argument("host")
    p.add_argument("watermark")
    p.add_argument("suite", help="attack-suite config file")
    p.add_argument("-o", "--output", help="CSV path (default stdout)")
    p.add_argument("--jobs", type=int, default=1)
    _add_embed_flags(p)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, PGMError, KeyFormatError, CapacityError, SuiteError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
