import numpy as np
import pytest

from wentelab.grid import make_grid

# acceptance lines collected by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ref_grid():
    return make_grid(128, 8, 16)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(32, 2, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
