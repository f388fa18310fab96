import pytest

_LINES: dict[str, str] = {}


@pytest.fixture
def report_criterion():
    """Record one PASS/FAIL line for an acceptance criterion (printed at the end)."""

    def record(key: str, title: str, ok: bool, detail: str, seconds: float):
        line = f"criterion {key:<3} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{seconds:.2f} s]"
        _LINES[key] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_LINES, key=lambda k: (int(k.rstrip("abcdefgh")), k)):
        terminalreporter.write_line(_LINES[key])
