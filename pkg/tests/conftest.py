import math

import numpy as np
import pytest

from padeadi.grid import Grid3D

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one acceptance verdict; the terminal summary lists them all."""
    def _record(number: int, passed: bool, detail: str = ""):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"CRITERION {number}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def cube7():
    return Grid3D(7, 7, 7, 1 / 6, 1 / 6, 1 / 6)


def zero_faces(a):
    a[0], a[-1] = 0.0, 0.0
    a[:, 0], a[:, -1] = 0.0, 0.0
    a[:, :, 0], a[:, :, -1] = 0.0, 0.0
    return a


PI = math.pi
