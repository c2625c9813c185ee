"""Shared pytest wiring for the acceptance gate.

Collects the outcome of every ``test_criterion_*`` test and prints one
PASS/FAIL line per criterion at the end of the run.
"""

import re

_CRITERION = re.compile(r"test_criterion_(\d+)_([a-z0-9_]+)")

_results: dict[tuple[str, str], bool] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if match is None:
        return
    if report.when == "call" or report.failed:
        key = (match.group(1), match.group(2))
        _results[key] = _results.get(key, True) and report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, slug), passed in sorted(_results.items()):
        label = slug.replace("_", " ")
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {int(number)} ({label}): {verdict}")
