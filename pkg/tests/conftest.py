import math
from pathlib import Path

import numpy as np
import pytest

from coexist import problem_io

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE = {}


def closed_form_green(k, T, t, s):
    """Periodic Green's function of ``z'' + k^2 z`` for ``0 < kT/2 < pi/2``."""
    d = np.abs(np.subtract.outer(t, s))
    return np.cos(k * (d - T / 2)) / (2 * k * math.sin(k * T / 2))


def closed_form_green_negative(k, T, t, s):
    """Periodic Green's function of ``z'' - k^2 z``."""
    d = np.abs(np.subtract.outer(t, s))
    return -np.cosh(k * (d - T / 2)) / (2 * k * math.sinh(k * T / 2))


def cone_sample(rng, n, norm, c):
    """Random grid function with sup-norm ``norm`` and ``min >= c * max``."""
    t = np.arange(n) * (2 * math.pi / n)
    w = sum(rng.normal() * np.cos(j * t + rng.uniform(0, 2 * math.pi)) for j in range(4))
    w = (w - w.min()) / (w.max() - w.min())
    return norm * (c + (1 - c) * w)


@pytest.fixture(scope="session")
def problems_dir():
    return PROBLEMS


@pytest.fixture(scope="session")
def subsup():
    return problem_io.load(PROBLEMS / "sublinear_superlinear.json")


@pytest.fixture(scope="session")
def subsup_certificate(subsup):
    from coexist.shells import find_radii
    return find_radii(subsup.problem)


@pytest.fixture(scope="session")
def singular():
    return problem_io.load(PROBLEMS / "singular.json")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {text}")
