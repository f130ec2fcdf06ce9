import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers",
                            "acceptance: criterion-level acceptance test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.get_closest_marker("acceptance"):
        _ACCEPTANCE_RESULTS.append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _ACCEPTANCE_RESULTS:
        label = name.replace("test_criterion_", "").replace("_", " ")
        terminalreporter.write_line(
            f"[{'PASS' if passed else 'FAIL'}] {label}")
