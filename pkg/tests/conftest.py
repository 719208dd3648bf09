"""Shared fixtures and the acceptance summary printed after the run."""

from __future__ import annotations

import pytest

from ctm.sampling import SampleBudget

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def budget() -> SampleBudget:
    return SampleBudget(4000, seed=0)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
