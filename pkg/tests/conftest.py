import contextlib

ACCEPTANCE_LINES = []


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record one acceptance criterion's verdict for the terminal summary."""
    detail = {}
    try:
        yield detail
    except Exception as exc:
        ACCEPTANCE_LINES.append((number, f"AC{number:<2} FAIL  {title}: {type(exc).__name__}: {exc}"))
        raise
    note = f" ({detail['note']})" if "note" in detail else ""
    ACCEPTANCE_LINES.append((number, f"AC{number:<2} PASS  {title}{note}"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
