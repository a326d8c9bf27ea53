import pytest

from wbench import acceptance

_LINES = []


@pytest.fixture(scope="session")
def seed_closure():
    return acceptance.seed_closure()


@pytest.fixture
def acceptance_log():
    return _LINES


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
