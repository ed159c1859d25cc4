"""Shared fixtures: cached scenario runs reused across test modules."""

import math

import pytest

from statlight import parse_config
from statlight.scenario import run_scenario

OM0 = math.sqrt(1e-3)

# gamma2 = 0 twin of the canonical hold; snapshots land on the conversion
# sample times so one run feeds the width, conversion and conservation checks
CANON0_TEXT = f"""
medium.r_g = 1
medium.gamma = 1
medium.gamma2 = 0
medium.u_g0 = 1e-3
medium.domain_length = 200
medium.grid_points = {{n}}
pulse.prepared = true
pulse.duration = 2e4
pulse.center = 100
schedule.segment = 0 1.1e4 {OM0!r} {OM0!r} 50
engine = direct
run.t_end = 1e4
run.snapshot_interval = 2500
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def report():
    def _report(num: int, label: str, ok: bool, detail: str):
        line = f"criterion {num:2d} {label}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        assert ok, line
    return _report


@pytest.fixture(scope="session")
def run_text():
    cache: dict = {}

    def _run(text: str):
        if text not in cache:
            cache[text] = run_scenario(parse_config(text))
        return cache[text]

    return _run


@pytest.fixture(scope="session")
def preset_run(run_text):
    from statlight import get_preset

    def _get(name: str):
        return run_text(get_preset(name))

    return _get


@pytest.fixture(scope="session")
def canon0_run(run_text):
    return run_text(CANON0_TEXT.format(n=4096))


@pytest.fixture(scope="session")
def canon0_fine_run(run_text):
    return run_text(CANON0_TEXT.format(n=8192))
