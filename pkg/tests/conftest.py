"""Shared hooks: the acceptance suite prints one summary line per criterion."""

import pytest

ACCEPTANCE = {}


def record(criterion: int, case: str, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((case, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        cases = ACCEPTANCE[crit]
        ok = all(c[1] for c in cases)
        failed = [f"{c[0]} ({c[2]})" for c in cases if not c[1]]
        worst = "; ".join(failed) if failed else cases[-1][2]
        tr.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  "
                      f"[{sum(c[1] for c in cases)}/{len(cases)} cases] {worst}")


@pytest.fixture
def acceptance():
    """``acceptance(criterion, case, ok, detail)`` logs one case for the summary."""
    return record
