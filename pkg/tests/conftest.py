import pytest
from mpmath import mp

from confocal_billiards.catalog import build_catalog

ACCEPTANCE_LINES = []


@pytest.fixture(autouse=True)
def prec256():
    with mp.workprec(256):
        yield


@pytest.fixture(scope="session")
def catalog():
    with mp.workprec(256):
        return build_catalog()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
