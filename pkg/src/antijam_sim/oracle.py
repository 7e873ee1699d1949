"""Independent checks on channel probabilities and protocol behaviour.

``q0`` / ``q1`` are the closed forms for "nobody sends" and "exactly one
sends"; ``enumerate_channel`` gets the same numbers by summing over all 2**n
transmit patterns. ``TransitionMonitor`` steps a run one slot at a time and checks
the post-slot node states against what the protocol must produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .adversary import AdversaryConfig, Strategy, window_violations
from .engine import Outcome, Protocol, RunTrace, SimConfig, Simulator

ENUMERATION_MAX_N = 12


def _probs(pv) -> np.ndarray:
    p = np.asarray(pv, dtype=np.float64)
    if p.ndim != 1 or np.any(p < 0) or np.any(p >= 1):
        raise ValueError("probabilities must be a 1-d vector with entries in [0, 1)")
    return p


def q0(pv) -> float:
    """Probability that nobody transmits: prod(1 - p_v), accumulated in logs."""
    p = _probs(pv)
    return float(math.exp(np.log1p(-p).sum()))


def q1(pv) -> float:
    """Probability that exactly one node transmits."""
    p = _probs(pv)
    return q0(p) * float(np.sum(p / (1.0 - p)))


def enumerate_channel(pv) -> tuple[float, float]:
    """(idle, single-sender) probabilities by summing over every transmit pattern."""
    p = _probs(pv)
    n = p.size
    if n > ENUMERATION_MAX_N:
        raise ValueError(f"enumeration is capped at n={ENUMERATION_MAX_N}")
    patterns = (np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1
    weights = np.where(patterns == 1, p[None, :], 1.0 - p[None, :]).prod(axis=1)
    senders = patterns.sum(axis=1)
    return float(weights[senders == 0].sum()), float(weights[senders == 1].sum())


def check_success_bounds(pv, p_hat: float, rel_tol: float = 1e-9) -> bool:
    """q0 * p <= q1 <= q0 * p / (1 - p_hat), each side within ``rel_tol``."""
    if p_hat >= 1:
        raise ValueError("p_hat must be < 1")
    p = _probs(pv)
    if np.any(p > p_hat * (1 + 1e-12)):
        raise ValueError("every p_v must be <= p_hat")
    total = float(p.sum())
    a, b = q0(p), q1(p)
    lo = a * total
    hi = a * total / (1.0 - p_hat)
    if a == 0.0:
        # q0 underflowed; compare q1 / q0 = sum p/(1-p) against the bounds instead.
        ratio = float(np.sum(p / (1.0 - p)))
        return total <= ratio * (1 + rel_tol) and ratio <= total / (1.0 - p_hat) * (1 + rel_tol)
    return lo <= b * (1 + rel_tol) and b <= hi * (1 + rel_tol)


def empirical_rates(trace: RunTrace) -> tuple[float, float]:
    """Observed (idle, success) frequencies of a trace."""
    total = len(trace)
    if total == 0:
        raise ValueError("empty trace")
    idle = np.count_nonzero(trace.outcome == Outcome.IDLE)
    succ = np.count_nonzero(trace.outcome == Outcome.SUCCESS)
    return idle / total, succ / total


def binomial_halfwidth(q: float, samples: int, sigmas: float = 4.0) -> float:
    return sigmas * math.sqrt(max(q * (1 - q), 0.0) / samples)


def random_prob_vector(rng: np.random.Generator, p_hat: float, max_n: int = 2000) -> np.ndarray:
    """Random vector below ``p_hat``: mixes uniform draws with protocol-like lattices."""
    n = int(rng.integers(1, max_n + 1))
    kind = rng.integers(3)
    if kind == 0:
        return rng.uniform(0, p_hat, n)
    if kind == 1:
        gamma = rng.uniform(0.01, 0.5)
        return p_hat * (1 + gamma) ** -rng.integers(0, 2, n).astype(np.float64) * (1 + gamma) ** -rng.integers(0, 40)
    p = rng.uniform(0, p_hat, n)
    p[rng.random(n) < 0.3] = p_hat
    return p


@dataclass
class TransitionReport:
    slots: int = 0
    success_slots: int = 0
    clamp_free_idle_slots: int = 0
    quiet_busy_slots: int = 0
    same_sender_slots: int = 0
    ratio_checks: int = 0
    bounds_checks: int = 0
    violation_count: int = 0
    violations: list = field(default_factory=list)  # first 50 only

    def fail(self, t: int, what: str) -> None:
        self.violation_count += 1
        if len(self.violations) < 50:
            self.violations.append(f"slot {t}: {what}")

    @property
    def ok(self) -> bool:
        return self.violation_count == 0


def _close(a, b, tol) -> bool:
    return bool(np.all(np.abs(np.asarray(a) - np.asarray(b)) <= tol * np.maximum(np.abs(a), np.abs(b))))


class TransitionMonitor:
    """Step an AntiJam simulator slot by slot and check every transition.

    Checks: receivers adopt (p'/(1+g), c', T') after a success; clamp-free
    idle slots scale the cumulative p by exactly (1+g); busy slots without a
    threshold firing leave p unchanged; a repeat sender leaves the cumulative
    p unchanged; max/min p is 1 or (1+g) once a success happened; p <= p_hat,
    c >= 1, T >= 1; optionally the success-probability bounds on every pre-slot vector.
    """

    def __init__(self, config: SimConfig, rel_tol: float = 1e-12, bounds: bool = False,
                 transitions: bool = True):
        if config.protocol is not Protocol.ANTIJAM:
            raise ValueError("TransitionMonitor needs an AntiJam config")
        self.sim = Simulator(config)
        self.params = config.protocol_params
        self.g = 1.0 + self.params.gamma
        self.tol = rel_tol
        self.bounds = bounds
        self.transitions = transitions
        self.report = TransitionReport()
        self.last_sender: Optional[int] = None

    def run(self) -> TransitionReport:
        while self.sim.remaining:
            self.step()
        return self.report

    def step(self) -> None:
        sim, rep, g, tol = self.sim, self.report, self.g, self.tol
        p_hat = self.params.p_hat
        t = sim.t
        p0, c0, T0 = sim.p.copy(), sim.c.copy(), sim.T.copy()
        if self.bounds:
            rep.bounds_checks += 1
            if not check_success_bounds(p0, p_hat):
                rep.fail(t, "q0*P <= q1 <= q0*P/(1 - p_hat) violated")
        sim.step(1)
        rep.slots += 1
        if not self.transitions:
            return
        p1, c1, T1 = sim.p, sim.c, sim.T
        outcome = Outcome(int(sim._buf.outcome[t]))
        tx = sim.tx

        if p1.max() > p_hat * (1 + tol) or c1.min() < 1 or T1.min() < 1:
            rep.fail(t, "p <= p_hat / c >= 1 / T >= 1 invariant broken")

        if outcome is Outcome.SUCCESS:
            u = int(sim._buf.sender[t])
            rep.success_slots += 1
            recv = ~tx
            if not (np.all(c1 == c1[u]) and np.all(T1 == T1[u])):
                rep.fail(t, "(c, T) not synchronized after success")
            # Sender keeps (p', c', T') up to its own end-of-slot step.
            fired = c0[u] + 1 > T0[u]
            ok_sender = (
                (not fired and c1[u] == c0[u] + 1 and T1[u] == T0[u] and p1[u] == p0[u])
                or (fired and c1[u] == 1 and T1[u] == T0[u] and p1[u] == p0[u])
                or (fired and c1[u] == 1 and T1[u] == T0[u] + 2 and _close(p1[u], p0[u] / g, tol))
            )
            if not ok_sender:
                rep.fail(t, "sender state not (p', c', T') modulo counter step")
            if recv.any() and not _close(p1[recv], p1[u] / g, tol):
                rep.fail(t, "receiver p != sender p / (1 + gamma)")
            synced = recv.any() and _close(p0[recv], p0[u] / g, tol)
            if self.last_sender == u and T1[u] == T0[u] and synced:
                rep.same_sender_slots += 1
                if not _close(p1.sum(), p0.sum(), tol):
                    rep.fail(t, "repeat sender changed cumulative p")
            self.last_sender = u
        elif outcome is Outcome.IDLE:
            if np.any(T1 > np.maximum(T0 - 1, 1)):
                rep.fail(t, "threshold rule lowered p on an idle slot")
            if p0.max() * g < p_hat * (1 - 1e-9):
                rep.clamp_free_idle_slots += 1
                if not _close(p1.sum(), g * p0.sum(), tol):
                    rep.fail(t, "clamp-free idle slot did not scale cumulative p by (1 + gamma)")
        else:
            if np.all(T1 == T0):
                rep.quiet_busy_slots += 1
                if not np.array_equal(p1, p0):
                    rep.fail(t, "busy slot changed p without a threshold firing")

        if self.last_sender is not None:
            rep.ratio_checks += 1
            ratio = p1.max() / p1.min()
            if not (abs(ratio - 1.0) <= tol * 10 or abs(ratio - g) <= tol * 10 * g):
                rep.fail(t, f"p ratio {ratio!r} not in {{1, 1 + gamma}}")
        elif p1.max() != p1.min():
            rep.fail(t, "p values diverged before the first success")


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def bounds_random(count: int = 1000, p_hat: float = 1 / 24, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = sum(not check_success_bounds(random_prob_vector(rng, p_hat), p_hat) for _ in range(count))
    return CheckResult("success-bounds-random", bad == 0, f"{count} vectors, {bad} violations")


def enumeration_equivalence(per_n: int = 200, max_n: int = ENUMERATION_MAX_N, seed: int = 2,
                            tol: float = 1e-12) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    extra = 0
    for n in range(1, max_n + 1):
        for _ in range(per_n):
            p = rng.uniform(0, 0.999, n) * (rng.random(n) < 0.9)
            e0, e1 = enumerate_channel(p)
            a, b = q0(p), q1(p)
            worst = max(worst, abs(a - e0), abs(b - e1))
            if a + b > 1 + tol:
                extra += 1
    ok = worst <= tol and extra == 0
    return CheckResult("q0-q1-enumeration", ok, f"max abs error {worst:.3e}, q0+q1>1 in {extra} cases")


def transition_suite(steps: int = 100_000, n: int = 200, seed: int = 3, bounds: bool = False) -> CheckResult:
    cfg = SimConfig(n=n, steps=steps, seed=seed,
                    adversary=AdversaryConfig(T=100, epsilon=0.5, strategy=Strategy.BUSY_DET))
    rep = TransitionMonitor(cfg, bounds=bounds).run()
    detail = (f"{rep.slots} slots, {rep.success_slots} success, {rep.clamp_free_idle_slots} clamp-free idle, "
              f"{rep.quiet_busy_slots} quiet busy, {rep.violation_count} violations")
    if rep.violations:
        detail += f"; first: {rep.violations[0]}"
    return CheckResult("transition-suite" + ("+bounds" if bounds else ""), rep.ok, detail)


def budget_scan(steps: int = 20_000, seed: int = 4) -> CheckResult:
    bad = 0
    runs = 0
    for protocol in Protocol:
        for strategy in Strategy:
            for eps, T in ((0.5, 100), (0.1, 37), (0.9, 10), (0.3, 1)):
                cfg = SimConfig(n=50, steps=steps, seed=seed, protocol=protocol,
                                adversary=AdversaryConfig(T=T, epsilon=eps, strategy=strategy))
                tr = Simulator(cfg).run()
                bad += window_violations(tr.jammed, T, eps)
                runs += 1
    return CheckResult("budget-window-scan", bad == 0, f"{runs} traces, {bad} violating windows")


def verify_suite(quick: bool = False) -> list[CheckResult]:
    steps = 20_000 if quick else 100_000
    return [
        bounds_random(),
        enumeration_equivalence(per_n=50 if quick else 200),
        transition_suite(steps=steps, bounds=True),
        budget_scan(steps=5_000 if quick else 20_000),
    ]
