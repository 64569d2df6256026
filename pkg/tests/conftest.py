import time

import numpy as np
import pytest

import report

_START = time.perf_counter()
SUITE_BUDGET = 600.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not report.LINES:
        return
    elapsed = time.perf_counter() - _START
    tr = terminalreporter
    tr.section("acceptance")
    for line in report.LINES:
        tr.write_line(line)
    verdict = "PASS" if elapsed < SUITE_BUDGET else "FAIL"
    tr.write_line(f"[{verdict}] 8 (runtime): full suite {elapsed:.1f} s, budget {SUITE_BUDGET:.0f} s")
