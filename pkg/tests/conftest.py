"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

import re
import time

SUITE_BUDGET = 120.0
_start = time.perf_counter()
_labels: dict[int, str] = {}
_failed: dict[int, bool] = {}
_NAME = re.compile(r"test_acceptance\.py::test_criterion(\d+)_")


def pytest_collection_modifyitems(items):
    for item in items:
        m = _NAME.search(item.nodeid)
        if m:
            k = int(m.group(1))
            _failed.setdefault(k, False)
            doc = (item.function.__doc__ or "").strip().splitlines()
            if doc and k not in _labels:
                _labels[k] = doc[0]


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if m and (report.failed or (report.when == "call" and not report.passed)):
        _failed[int(m.group(1))] = True


def pytest_terminal_summary(terminalreporter):
    if not _failed:
        return
    elapsed = time.perf_counter() - _start
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_failed):
        ok = not _failed[k]
        extra = ""
        if k == 8:
            ok = ok and elapsed < SUITE_BUDGET
            extra = f" (suite runtime {elapsed:.1f} s, budget {SUITE_BUDGET:.0f} s)"
        tr.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {_labels.get(k, '')}{extra}")
