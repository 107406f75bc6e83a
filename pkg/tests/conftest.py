import numpy as np
import pytest

from spinphase import HilbertParams

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

HALF_SPINS = [0.5, 1.0, 1.5]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[1.0, 2.0], ids=["hbar1", "hbar2"])
def hbar(request):
    return request.param


@pytest.fixture(params=HALF_SPINS, ids=lambda j: f"j{j:g}")
def small_params(request, hbar):
    return HilbertParams.from_spin(request.param, hbar)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
