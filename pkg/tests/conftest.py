import sys

import pytest

from capflow.scenarios import ScenarioSpec, build
from capflow.stepper import StepperConfig, evolve

from _helpers import HEADLINE


@pytest.fixture(scope="session")
def headline_run():
    """Headline scenario under the area-preserving law, IMEX dt=1e-3, every step recorded."""
    p0 = build(ScenarioSpec(**HEADLINE))
    return evolve(p0, "AreaPreserving", StepperConfig(dt=1e-3, record_every=1))


@pytest.fixture(scope="session")
def headline_run_fine():
    p0 = build(ScenarioSpec(**{**HEADLINE, "m": 401}))
    return evolve(p0, "AreaPreserving", StepperConfig(dt=2.5e-4, record_every=1))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.REPORT, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
