"""Shared pytest configuration.

Prints a one-line PASS/FAIL verdict per acceptance criterion at the end of
the run, so the terminal output carries the acceptance scorecard even when
everything passes.
"""

from __future__ import annotations

import re


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts: dict[str, str] = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" not in report.nodeid:
                continue
            if getattr(report, "when", "call") != "call" and outcome != "error":
                continue
            m = re.search(r"test_criterion_(\d+)_(\w+)", report.nodeid)
            if not m:
                continue
            label = f"criterion {int(m.group(1)):2d} ({m.group(2).replace('_', ' ')})"
            verdicts[label] = "PASS" if outcome == "passed" else "FAIL"
    if verdicts:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for label in sorted(verdicts):
            terminalreporter.write_line(f"  {label}: {verdicts[label]}")
