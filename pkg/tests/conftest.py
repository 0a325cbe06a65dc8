import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        status = "PASS" if call.excinfo is None else "FAIL"
        prev = _RESULTS.get(number)
        if prev is None or prev[0] == "PASS":
            _RESULTS[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
