import pytest

from noisybs.numerics import RngStream, haar_unitary

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def unitary8():
    return haar_unitary(8, RngStream(11))


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
