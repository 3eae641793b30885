from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from quantsafe.core import parse_automaton

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

settings.register_profile("default", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def load(name):
    return parse_automaton((FIXTURES / name).read_text())


@pytest.fixture
def fig1a():
    return load("fig1a.qa")


@pytest.fixture
def fig1b():
    return load("fig1b.qa")


@pytest.fixture
def fig1c():
    return load("fig1c.qa")


@pytest.fixture
def fig2():
    return load("fig2.qa")


@pytest.fixture
def dsum_ab():
    return load("dsum.qa")


@pytest.fixture
def limavg_ab():
    return load("limavg.qa")


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
