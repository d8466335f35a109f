"""Shared test plumbing.

The acceptance suite records one line per criterion; the terminal summary
prints them all so a single glance shows which criteria hold.
"""

ACCEPTANCE_RESULTS = []


def record_acceptance(criterion: int, ok: bool, detail: str):
    ACCEPTANCE_RESULTS.append((criterion, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {criterion:2d}: {status}  {detail}")
