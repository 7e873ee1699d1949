import numpy as np
import pytest

from antijam_sim.adversary import window_violations
from antijam_sim.engine import RunTrace

# Every trace built anywhere in the suite is window-scanned against its
# jamming budget; the session fails if any window is over budget.
BUDGET_SCAN = {"traces": 0, "violations": 0}
ACCEPTANCE_LINES: list[str] = []

_original_post_init = RunTrace.__post_init__


def _scanning_post_init(self):
    _original_post_init(self)
    cfg = self.config
    if cfg is not None:
        BUDGET_SCAN["traces"] += 1
        BUDGET_SCAN["violations"] += window_violations(self.jammed, cfg.adversary.T, cfg.adversary.epsilon)


RunTrace.__post_init__ = _scanning_post_init


def pytest_terminal_summary(terminalreporter):
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    terminalreporter.write_line(
        f"budget window scan over the whole suite: {BUDGET_SCAN['traces']} traces, "
        f"{BUDGET_SCAN['violations']} violating windows"
    )


def pytest_sessionfinish(session, exitstatus):
    if BUDGET_SCAN["violations"] and exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
