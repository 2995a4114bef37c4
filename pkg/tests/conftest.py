import pytest

_LINES = []


@pytest.fixture(scope="session")
def report():
    """Record one acceptance line; all lines are repeated in the terminal summary."""

    def emit(criterion, ok, detail):
        line = f"CRITERION {criterion:>2} {'PASS' if ok else 'FAIL'}: {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
