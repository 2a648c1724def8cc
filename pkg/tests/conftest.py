"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import re

_RESULTS = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)$")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    props = dict(report.user_properties)
    entry = _RESULTS.setdefault(int(m.group(1)), {"outcome": "passed", "title": "", "detail": ""})
    entry["title"] = props.get("criterion", entry["title"])
    entry["detail"] = props.get("detail", entry["detail"])
    if report.failed:
        entry["outcome"] = "failed"
        if not entry["detail"]:
            entry["detail"] = report.longrepr.reprcrash.message if hasattr(report.longrepr, "reprcrash") else ""
    elif report.skipped and report.when in ("setup", "call"):
        entry["outcome"] = "skipped"


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        r = _RESULTS[num]
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[r["outcome"]]
        terminalreporter.write_line(f"criterion {num:2d} {status}  {r['title']}: {r['detail']}")
