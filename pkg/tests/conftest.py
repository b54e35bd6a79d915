import pytest

from lwirms.plasmonics import default_filters
from lwirms.sensor import DetectorModel

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def detector():
    return DetectorModel.build()


@pytest.fixture(scope="session")
def filters():
    return default_filters()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
