import math

import numpy as np
import pytest

from mfsquad.geom import Polygon

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]


@pytest.fixture
def square():
    return Polygon(SQUARE)


@pytest.fixture
def l_shape():
    return Polygon(L_SHAPE)


def regular_pts(n, side=1.0):
    """Independent construction of a unit-side regular polygon (no library code)."""
    R = side / (2 * math.sin(math.pi / n))
    return np.array([(R * math.cos(2 * math.pi * k / n), R * math.sin(2 * math.pi * k / n)) for k in range(n)])


ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def _record(num: int, ok: bool, detail: str):
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE_LINES[num] = line
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
