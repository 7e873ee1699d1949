import numpy as np
import pytest
from scipy import stats

from antijam_sim import rng
from antijam_sim.adversary import AdversaryConfig, Strategy
from antijam_sim.antijam import ConfigError
from antijam_sim.dcf import (
    DcfNodeState,
    DcfParams,
    SlotView,
    dcf_decide,
    dcf_update,
    fresh_state,
)
from antijam_sim.engine import Outcome, Protocol, SimConfig, Simulator, run
from antijam_sim.metrics import throughput

PARAMS = DcfParams()


class FixedStream:
    def __init__(self, u):
        self.u = u

    def at(self, counter):
        return self.u


def test_decide():
    assert dcf_decide(DcfNodeState(cw=15, backoff=0)) is True
    assert dcf_decide(DcfNodeState(cw=15, backoff=3)) is False


def test_idle_decrements():
    s = dcf_update(DcfNodeState(15, 4), SlotView.IDLE_OBSERVED, PARAMS, FixedStream(0.5))
    assert (s.cw, s.backoff) == (15, 3)


def test_busy_freezes():
    s = DcfNodeState(15, 4)
    assert dcf_update(s, SlotView.BUSY_OBSERVED, PARAMS, FixedStream(0.5)) == s


def test_failure_doubles():
    s = dcf_update(DcfNodeState(15, 0), SlotView.MY_FAILURE, PARAMS, FixedStream(0.0))
    assert s.cw == 31 and s.backoff == 0 and s.draws == 1


def test_failure_capped():
    s = dcf_update(DcfNodeState(1023, 0), SlotView.MY_FAILURE, PARAMS, FixedStream(1 - 2**-53))
    assert s.cw == 1023 and s.backoff == 1023


def test_success_resets():
    s = dcf_update(DcfNodeState(255, 0, draws=4), SlotView.MY_SUCCESS, PARAMS, FixedStream(0.5))
    assert s.cw == 15 and s.backoff == 8 and s.draws == 5


def test_cw_trajectory():
    allowed = {15, 31, 63, 127, 255, 511, 1023}
    s = DcfNodeState(15, 0)
    stream = rng.rng_stream(1, 0)
    for k in range(200):
        view = SlotView.MY_FAILURE if k % 9 else SlotView.MY_SUCCESS
        s = dcf_update(s, view, PARAMS, stream)
        assert s.cw in allowed
        assert 0 <= s.backoff <= s.cw


def test_fresh_backoff_uniform():
    draws = np.array([fresh_state(PARAMS, rng.uniform_at(rng.stream_key(4, v), 0)).backoff
                      for v in range(100_000)])
    counts = np.bincount(draws, minlength=16)
    assert counts.size == 16
    _, pvalue = stats.chisquare(counts)
    assert pvalue > 1e-3


def test_params_rejected():
    with pytest.raises(ConfigError):
        DcfParams(cw_min=0)
    with pytest.raises(ConfigError):
        DcfParams(cw_min=31, cw_max=15)


def test_single_node_renewal_throughput():
    # One node, no jammer: each cycle is (backoff ~ U{0..15}) idle slots plus one success.
    cfg = SimConfig(n=1, steps=100_000, seed=6, protocol=Protocol.DCF,
                    adversary=AdversaryConfig(strategy=Strategy.NONE))
    tr = run(cfg)
    assert np.all(tr.outcome[tr.num_transmitters == 1] == Outcome.SUCCESS)
    expected = 1 / (1 + 15 / 2)
    assert abs(throughput(tr).value - expected) / expected < 0.05


def test_backoff_freezes_on_busy_slots():
    cfg = SimConfig(n=30, steps=3000, seed=2, protocol=Protocol.DCF,
                    adversary=AdversaryConfig(T=20, epsilon=0.5, strategy=Strategy.IDLE_DET))
    sim = Simulator(cfg)
    for _ in range(cfg.steps):
        before = sim.backoff.copy()
        sim.step(1)
        t = sim.t - 1
        out = sim._buf.outcome[t]
        listening = ~sim.tx
        if out != Outcome.IDLE:
            assert np.array_equal(sim.backoff[listening], before[listening])
        else:
            assert np.array_equal(sim.backoff[listening], np.maximum(before[listening] - 1, 0))
