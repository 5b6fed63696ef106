import numpy as np
import pytest

from nldiffusion.grid import Boundary, Grid3

# filled by test_acceptance; printed after the run whatever pytest captured
ACCEPTANCE = []


def record(number, title, passed, detail):
    ACCEPTANCE.append((number, title, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(
            f"criterion {number} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        )


@pytest.fixture
def free16():
    return Grid3.centered(16, 1.0, Boundary.FREE_DECAY)


@pytest.fixture
def periodic8():
    return Grid3.centered(8, 1.0, Boundary.PERIODIC)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
