import pytest

_CRITERIA: list[str] = []


@pytest.fixture
def criterion_log():
    """Collects acceptance lines so they also appear in the terminal summary."""
    return _CRITERIA.append


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
