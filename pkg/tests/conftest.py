import math
from pathlib import Path

import numpy as np
import pytest

from pumpnet.network import Element, Ladder

DATA = Path(__file__).resolve().parents[1] / "src" / "pumpnet" / "data"
FILTERED = DATA / "filtered_reference.json"
CAPACITIVE = DATA / "capacitive_reference.json"
TWO_PI = 2.0 * math.pi


def random_element(rng, lossless=False, allow_short=True):
    kinds = ["series_l", "series_c", "shunt_l", "shunt_c", "tline", "open_stub"]
    if allow_short:
        kinds.append("short_stub")
    if not lossless:
        kinds += ["series_r", "shunt_r"]
    k = kinds[rng.integers(len(kinds))]
    if k.endswith("_l"):
        return Element(k, rng.uniform(0.2e-9, 4e-9))
    if k.endswith("_c"):
        return Element(k, rng.uniform(0.05e-12, 2e-12))
    if k.endswith("_r"):
        return Element(k, rng.uniform(5.0, 300.0))
    return Element(k, rng.uniform(15.0, 120.0), rng.uniform(3e-12, 60e-12))


def random_ladder(rng, max_len=8, lossless=False, allow_short=True):
    n = int(rng.integers(1, max_len + 1))
    return Ladder(random_element(rng, lossless, allow_short) for _ in range(n))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    """Store an acceptance verdict for the terminal summary, then assert it."""
    ACCEPTANCE[number] = (title, bool(ok), detail)
    assert ok, f"criterion {number} ({title}) failed: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {title}: {detail}")
