import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "acceptance" not in report.keywords:
        return
    _acceptance.append((report.nodeid.split("::")[-1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, outcome, duration in _acceptance:
        tag = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"{tag}  {name}  ({duration:.2f}s)")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240517)
