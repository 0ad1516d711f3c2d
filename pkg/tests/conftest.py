import numpy as np
import pytest

from elastogauge.lattice import make_grid


@pytest.fixture
def grid():
    return make_grid(64, 2 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def loglog_slope(x, y):
    return np.polyfit(np.log(x), np.log(y), 1)[0]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
