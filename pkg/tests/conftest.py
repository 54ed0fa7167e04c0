import pytest

from gasleak import presets
from gasleak.domain import SeriesConfig
from gasleak.oracle import FDConfig


@pytest.fixture(scope="session")
def params():
    return presets.paper_params()


@pytest.fixture(scope="session")
def scenario():
    return presets.paper_scenario()


@pytest.fixture(scope="session")
def validated():
    return presets.paper_validated()


@pytest.fixture(scope="session")
def pair():
    return presets.paper_pair()


@pytest.fixture(scope="session")
def states():
    return presets.paper_fit_states()


@pytest.fixture(scope="session")
def cfg():
    return SeriesConfig()


@pytest.fixture(scope="session")
def fd():
    return FDConfig()


ACCEPTANCE_LINES = {}


@pytest.fixture()
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
