"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_criteria = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, {"title": title, "failed": [], "seen": 0})
    if report.when == "call" or report.outcome != "passed":
        entry["seen"] += report.when == "call"
        if report.outcome != "passed":
            entry["failed"].append(report.nodeid.split("::")[-1])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        verdict = "FAIL" if entry["failed"] else "PASS"
        line = f"criterion {number}: {verdict}  {entry['title']}"
        if entry["failed"]:
            line += f"  (failed: {', '.join(dict.fromkeys(entry['failed']))})"
        terminalreporter.write_line(line)
