from __future__ import annotations

import io
import json
import os
import time

import pytest
from hypothesis import HealthCheck, settings

from grassfano import cli

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

THREADS = max(1, min(8, os.cpu_count() or 1))

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}
# test function node id (parameters stripped) -> list of call outcomes seen this session
OUTCOMES = {}
TIMINGS = {}


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="session")
def full_report():
    """One verify-catalog --all run shared by every test that needs it."""
    t0 = time.perf_counter()
    code, out, err = run_cli("verify-catalog", "--all", "--json", "--threads", str(THREADS))
    TIMINGS["verify_all"] = time.perf_counter() - t0
    return code, json.loads(out)


def pytest_collection_modifyitems(items):
    # acceptance reads outcomes of the module suites, so it goes last
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py"))


def pytest_runtest_logreport(report):
    if report.skipped:
        return
    if report.when == "call" or report.failed:
        OUTCOMES.setdefault(report.nodeid.split("[")[0], []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
