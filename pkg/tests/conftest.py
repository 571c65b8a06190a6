import numpy as np
import pytest

from cgmyasym.model import PRESETS

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=sorted(PRESETS))
def preset(request):
    return PRESETS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
