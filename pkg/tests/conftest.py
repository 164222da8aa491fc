import numpy as np
import pytest

# measured quantities (gains, oracle gaps) collected by tests and echoed in
# the terminal summary so a plain `pytest -v` run records them
MEASURED = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if MEASURED:
        terminalreporter.section("measured results")
        for line in MEASURED:
            terminalreporter.write_line(line)


@pytest.fixture
def report():
    return MEASURED.append


@pytest.fixture
def rng():
    return np.random.default_rng(0x5A7)
