import pytest

_LINES = []


@pytest.fixture
def report():
    """Record an acceptance verdict; lines are echoed in the terminal summary."""
    def emit(ok: bool, label: str, detail: str = ""):
        line = f"{'PASS' if ok else 'FAIL'} {label}" + (f": {detail}" if detail else "")
        _LINES.append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance")
        for line in _LINES:
            terminalreporter.write_line(line)
