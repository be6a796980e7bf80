from __future__ import annotations

import pytest

_REPORT: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def report():
    """Record an acceptance outcome; lines are printed at the end of the run."""
    def _rec(criterion: int, ok: bool, detail: str = "") -> None:
        _REPORT.setdefault(criterion, []).append((ok, detail))
        print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")
    return _rec


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_REPORT):
        parts = _REPORT[c]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"criterion {c:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
