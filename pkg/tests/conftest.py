import numpy as np
import pytest

from csplines.grid import GridSpec

_ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    """Record an acceptance criterion outcome for the terminal summary."""

    def record(number, title, passed, detail=""):
        _ACCEPTANCE.append((number, title, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}: {detail}")


@pytest.fixture
def two_cell_grid():
    """Two unit cells side by side, as in the worked example."""
    return GridSpec(0.0, 2.0, 0.0, 1.0, 2, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
