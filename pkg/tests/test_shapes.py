"""Qualitative trends of the throughput curves, at reduced scale."""

import numpy as np

from antijam_sim.adversary import AdversaryConfig, Strategy
from antijam_sim.cli import SweepSpec, run_sweep
from antijam_sim.engine import SimConfig


def mean_by_value(rows):
    out = {}
    for r in rows:
        out.setdefault(r["value"], []).append(r["throughput"])
    return {k: float(np.mean(v)) for k, v in out.items()}


def test_gamma_sweep_mild_decline():
    base = SimConfig(n=200, steps=200_000, adversary=AdversaryConfig(strategy=Strategy.BUSY_DET))
    thr = mean_by_value(run_sweep(SweepSpec(base, "gamma", (0.05, 0.1, 0.2, 0.4), repetitions=3, seed_base=8)))
    vals = list(thr.values())
    assert vals[-1] < vals[0]
    assert max(vals) - min(vals) < 0.05
    assert min(vals) > 0.15


def test_epsilon_sweep_increasing():
    base = SimConfig(n=200, steps=100_000)
    thr = mean_by_value(run_sweep(SweepSpec(base, "epsilon", (0.2, 0.5, 0.8), repetitions=3, seed_base=9)))
    vals = list(thr.values())
    assert vals == sorted(vals)
