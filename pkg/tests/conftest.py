import pytest

from ubamc.linsolve import record_solves

ACCEPTANCE_LINES = []


def pytest_collection_modifyitems(items):
    # acceptance runs last so that its solver check sees every system solved in the run
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


@pytest.fixture(scope="session", autouse=True)
def solve_log():
    with record_solves() as log:
        yield log


@pytest.fixture
def report_line():
    def emit(line):
        print(line)
        ACCEPTANCE_LINES.append(line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
