import numpy as np
import pytest

from vbchain.kernel import build_example9, from_matrix

TWO_STATE = [[0.7, 0.3], [0.6, 0.4]]


@pytest.fixture
def two_state():
    return from_matrix(TWO_STATE)


@pytest.fixture
def identity3():
    return from_matrix(np.eye(3), np.full(3, 1 / 3))


@pytest.fixture(scope="session")
def ex9_pair():
    return build_example9(25)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def record(label: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
