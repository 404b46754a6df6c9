import pytest

from shiftconv.zeta import ZetaContext

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ctx():
    return ZetaContext(50)


@pytest.fixture(scope="session")
def ctx30():
    return ZetaContext(30)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
