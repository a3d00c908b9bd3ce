"""Shared pytest hooks: echo release-gate verdicts after the run.

The acceptance tests record one ``[PASS]``/``[FAIL]`` line per criterion;
stdout capture would hide them on success, so they are replayed in a
terminal section once the suite finishes.
"""

gate_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not gate_lines:
        return
    terminalreporter.section("release gate")
    for line in gate_lines:
        terminalreporter.write_line(line)
