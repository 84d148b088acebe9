import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion.

    The line is printed immediately and repeated in the terminal summary so
    it is visible even when output is captured.
    """

    def _report(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
