import pytest

_VERDICTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def verdict():
    """Record one acceptance line, then assert it."""

    def record(criterion: str, ok: bool, detail: str):
        _VERDICTS.append((criterion, bool(ok), detail))
        assert ok, f"criterion {criterion}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_VERDICTS, key=lambda v: [int(c) if c.isdigit() else c
                                                                   for c in _split(v[0])]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}")


def _split(cid: str):
    head = cid.rstrip("abcdefghijklmnopqrstuvwxyz")
    return [head, cid[len(head):]]
