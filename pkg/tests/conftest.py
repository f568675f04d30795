import re

import pytest

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running enumeration checks")


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    key = (int(match.group(1)), match.group(2))
    if report.when == "call" or report.outcome != "passed":
        failed = report.outcome != "passed"
        prev = _results.get(key)
        _results[key] = (failed or (prev is not None and prev[0]),
                         report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), (failed, secs) in sorted(_results.items()):
        terminalreporter.write_line("criterion %2d %-32s %s  (%.2fs)"
                                    % (num, name, "FAIL" if failed else "PASS",
                                       secs))
