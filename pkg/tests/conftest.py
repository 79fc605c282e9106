import pytest

from support import shared_corpus


@pytest.fixture(scope="session")
def programs():
    return shared_corpus()


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    lines = test_acceptance.report_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
