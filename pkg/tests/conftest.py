from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vetl.core import OfflineParams, PlanningHorizon, ResourceProvision  # noqa: E402
from vetl.offline import fit  # noqa: E402
from vetl.workload import default_model, generate_trace  # noqa: E402

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, text)`` records one acceptance line and returns ``ok``."""

    def record(n: int, ok: bool, text: str) -> bool:
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {text}"
        _CRITERIA[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n])


# shared scenario: 6 h planned intervals so a day-long run crosses several plan boundaries
HORIZON = PlanningHorizon(planned_interval_s=6 * 3600.0, input_window_s=6 * 3600.0, input_splits=8, switch_period_s=2.0)
PROVISION = ResourceProvision(
    onprem_cores=4,
    buffer_bytes=300e6,
    cloud_budget_credits=500.0,
    uplink_bytes_per_s=10e6,
    downlink_bytes_per_s=10e6,
)


@pytest.fixture(scope="session")
def workload():
    return default_model()


@pytest.fixture(scope="session")
def fitted(workload):
    trace = generate_trace(workload, 2 * 86400.0, seed=101)
    model, _ = fit(trace, workload, PROVISION, HORIZON, OfflineParams(k_count=3), seed=0)
    return model


@pytest.fixture(scope="session")
def horizon():
    return HORIZON


@pytest.fixture(scope="session")
def provision():
    return PROVISION
