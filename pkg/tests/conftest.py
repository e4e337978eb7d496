"""Shared pytest wiring: verdict lines for the acceptance criteria."""

import re

import pytest

_config = None
_PATTERN = re.compile(r"test_criterion_(\d+)")


def pytest_configure(config):
    global _config
    _config = config


@pytest.hookimpl(trylast=True)
def pytest_runtest_logreport(report):
    if report.when != "call" or _config is None:
        return
    match = _PATTERN.search(report.nodeid)
    if match is None:
        return
    reporter = _config.pluginmanager.get_plugin("terminalreporter")
    if reporter is None:
        return
    verdict = "PASS" if report.passed else "FAIL"
    reporter.write_line(f"ACCEPTANCE {int(match.group(1))}: {verdict}")
