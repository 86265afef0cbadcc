import pytest

from ecs_transfer.hilbert import FockCutoff
from ecs_transfer.model import SystemParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def default_params():
    """Default sweep parameters: lambda1 = lambda2 = 1, omega1 = omega2 = 20."""
    return SystemParams(1.0, 1.0, 20.0, 20.0)


@pytest.fixture
def small_cutoff():
    return FockCutoff(6)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
