from pathlib import Path

import numpy as np
import pytest

from wht_watermark.image_io import Image, quantize, read_pgm
from wht_watermark.prng import SplitMix64

DATA = Path(__file__).parent / "data"


def synthetic_host(seed: int = 2024, side: int = 512) -> Image:
    """Smooth ramps and ripples plus seeded Gaussian texture."""
    y, x = np.mgrid[0:side, 0:side].astype(np.float64)
    base = 128 + 60 * np.sin(2 * np.pi * x / 97) * np.cos(2 * np.pi * y / 61) + 30 * (x - y) / side
    noise = SplitMix64(seed).normal(side * side).reshape(side, side)
    return quantize(base + 8 * noise)


@pytest.fixture(scope="session")
def camera():
    return read_pgm(DATA / "camera.pgm")


@pytest.fixture(scope="session")
def moon():
    return read_pgm(DATA / "moon.pgm")


@pytest.fixture(scope="session")
def logo():
    return read_pgm(DATA / "logo64.pgm")


@pytest.fixture(scope="session")
def synthetic():
    return synthetic_host()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one PASS/FAIL line per acceptance criterion in the terminal summary

_acceptance = {}
_details = {}


@pytest.fixture
def measured(request):
    """Attach a short measured-values note to the current acceptance line."""
    name = request.node.name

    def note(text):
        _details[name] = text

    return note


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        if report.when == "call" or name not in _acceptance:
            _acceptance[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        verdict = "PASS" if _acceptance[name] == "passed" else "FAIL"
        detail = _details.get(name)
        terminalreporter.write_line(f"{verdict}  {name}" + (f"  ({detail})" if detail else ""))
