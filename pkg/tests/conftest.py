import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, text = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _criteria[cid] = ("PASS" if rep.passed else "FAIL", text)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, text): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria, key=lambda c: int(c.split("-")[1])):
        status, text = _criteria[cid]
        terminalreporter.write_line(f"[{status}] {cid}: {text}")
