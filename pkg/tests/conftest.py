"""Shared pytest hooks: print one summary line per acceptance criterion."""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance")
    if module is None:
        return
    started = getattr(module, "CRITERIA_STARTED", set())
    results = getattr(module, "CRITERIA_RESULTS", {})
    if not started:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria")
    for n in sorted(started):
        ok, detail = results.get(n, (False, "test errored before reporting"))
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[criterion {n}] {status} - {detail}")
