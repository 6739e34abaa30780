"""Shared pytest hooks: repeat the acceptance checklist in the summary."""
import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance checklist")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
