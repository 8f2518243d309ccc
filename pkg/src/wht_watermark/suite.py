"""Line-oriented attack-suite config.

::

    # optional embedding overrides, before the first block
    alpha = 0.05
    levels = 2

    [attack]
    kind = gaussian_blur
    ksize = 13

    [attack]
    name = noise100
    kind = gaussian_noise
    percent = 100
    seed = 7

Blank lines and ``#`` comments are ignored. ``name`` labels the CSV row
and defaults to the kind.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .attacks import AttackSpec

GLOBAL_KEYS = {"alpha": float, "levels": int, "p_coarse": int, "p_fine": int}


class SuiteError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    spec: AttackSpec


@dataclass
class Suite:
    entries: list[SuiteEntry] = field(default_factory=list)
    settings: dict = field(default_factory=dict)

    def to_text(self) -> str:
        out = [f"{k} = {v}" for k, v in self.settings.items()]
        for entry in self.entries:
            block = entry.spec.to_config()
            if entry.name != entry.spec.kind:
                head, rest = block.split("\n", 1)
                block = f"{head}\nname = {entry.name}\n{rest}"
            out.append(("\n" if out else "") + block.rstrip("\n"))
        return "\n".join(out) + "\n"


def _finish(block: dict, lineno: int) -> SuiteEntry:
    block = dict(block)
    if "kind" not in block:
        raise SuiteError(f"attack block ending before line {lineno} has no kind")
    kind = block.pop("kind")
    name = block.pop("name", kind)
    seed = block.pop("seed", None)
    try:
        seed = None if seed is None else int(seed)
        spec = AttackSpec(kind, block, seed)
    except ValueError as exc:
        raise SuiteError(f"attack block {name!r}: {exc}") from None
    return SuiteEntry(name, spec)


def parse_suite(text: str) -> Suite:
    suite = Suite()
    block: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[attack]":
            if block is not None:
                suite.entries.append(_finish(block, lineno))
            block = {}
            continue
        if "=" not in line:
            raise SuiteError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if block is None:
            if key not in GLOBAL_KEYS:
                raise SuiteError(f"line {lineno}: unknown setting {key!r}")
            try:
                suite.settings[key] = GLOBAL_KEYS[key](value)
            except ValueError:
                raise SuiteError(f"line {lineno}: bad value for {key}: {value!r}") from None
        else:
            if key in block:
                raise SuiteError(f"line {lineno}: duplicate key {key!r}")
            block[key] = value
    if block is not None:
        suite.entries.append(_finish(block, len(text.splitlines()) + 1))
    return suite


def read_suite(path) -> Suite:
    with open(path, encoding="utf-8") as fh:
        return parse_suite(fh.read())
