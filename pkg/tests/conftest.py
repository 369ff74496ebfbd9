"""Collects acceptance verdicts and prints one line per criterion at the end."""

import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    def _record(number: int, ok: bool, detail: str):
        ACCEPTANCE[number] = (ok, detail)
        assert ok, f"criterion {number}: {detail}"
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
