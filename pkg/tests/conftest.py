"""Emit the collected acceptance-criterion lines after the test run.

Terminal-summary output is never captured, so the one PASS/FAIL line per
criterion always reaches the console (and any transcript of it).
"""


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import CRITERION_LINES
    except ImportError:
        return
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
