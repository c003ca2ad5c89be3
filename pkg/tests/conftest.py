import pytest

from ffiwasawa.algebra.field import field_make


@pytest.fixture(scope="session")
def F3():
    return field_make(3, 1)


@pytest.fixture(scope="session")
def F5():
    return field_make(5, 1)


@pytest.fixture(scope="session")
def F9():
    return field_make(3, 2)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
