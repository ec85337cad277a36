import math

import pytest

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

ACCEPTANCE_LINES = []


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def record():
    """Log one acceptance verdict line; returns the verdict for the assert."""

    def _record(criterion: str, passed: bool, detail: str) -> bool:
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
