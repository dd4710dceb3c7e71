"""Collects acceptance results and prints a one-line-per-criterion summary."""

import pytest

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    out = yield
    rep = out.get_result()
    if rep.when == "call" and "test_acceptance" in item.nodeid:
        _ACCEPTANCE[item.name] = rep.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE.items():
        terminalreporter.write_line(f"{name}: {outcome.upper()}")
