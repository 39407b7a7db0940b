import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    title = getattr(item.function, "criterion", None)
    if title is None or rep.when != "call" and not rep.failed:
        return
    prev = _CRITERIA.get(item.nodeid)
    ok = rep.passed and (prev is None or prev[1])
    _CRITERIA[item.nodeid] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for title, ok in sorted(_CRITERIA.values()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {title}")
