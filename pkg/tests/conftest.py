"""Print a one-line verdict per acceptance criterion at the end of the run."""

import re

_AC = re.compile(r"test_acceptance\.py::test_ac(\d+)_(\w+)")
_results = {}


def pytest_runtest_logreport(report):
    m = _AC.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or report.outcome != "passed":
        # a setup or teardown failure counts against the criterion too
        if report.outcome == "failed" or key not in _results:
            _results[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), outcome in sorted(_results.items()):
        tag = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"[{tag}] AC{num} {name.replace('_', ' ')}")
    passed = sum(v == "passed" for v in _results.values())
    terminalreporter.write_line(f"{passed}/{len(_results)} criteria pass")
