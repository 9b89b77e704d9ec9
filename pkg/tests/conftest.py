import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("default")

from isoquant.corpus import regular_ngon, square  # noqa: E402
from isoquant.geometry import RadialGraph2D  # noqa: E402


@pytest.fixture(scope="session")
def sq():
    return square()


@pytest.fixture(scope="session")
def hexagon():
    return regular_ngon(6)


@pytest.fixture(scope="session")
def disk():
    return RadialGraph2D(0.0, [], [])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria register one line each here; printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
