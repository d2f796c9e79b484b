import pytest

from latticedex import preset_code

# pass/fail lines recorded by tests/test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ex1_code():
    return preset_code("example1")


@pytest.fixture(scope="session")
def ex2_code():
    return preset_code("example2")


@pytest.fixture(scope="session")
def ex3_code():
    return preset_code("example3")


@pytest.fixture(scope="session")
def cyclo_code():
    return preset_code("cyclo-K4")


@pytest.fixture(scope="session")
def maxreal_code():
    return preset_code("maxreal-K3")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
