"""Synchronized slotted channel.

Slot order: every node draws its transmit decision, the jammer sees whether
the channel is active and decides, the outcome is resolved, listeners get
their observation, then every node runs its end-of-slot logic.

Two interchangeable backends:

* ``Simulator``: array state advanced by the compiled loops in ``_kernel``.
* ``ReferenceSimulator``: per-node Python objects driven by the pure
  transition functions in ``antijam`` / ``dcf``. Slow, but the readable
  definition; the test-suite checks both emit identical traces.
"""

from __future__ import annotations

import csv
import enum
import io
import warnings
from dataclasses import dataclass, field, fields
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from . import _kernel, antijam, dcf, rng
from .adversary import (
    AdversaryBudget,
    AdversaryConfig,
    JamHistory,
    JamPolicy,
    PreSlotView,
    Strategy,
    decide,
)
from .antijam import ConfigError, ProtocolParams
from .dcf import DcfParams


class Outcome(enum.IntEnum):
    IDLE = 0
    SUCCESS = 1
    COLLISION = 2
    JAMMED = 3

    @property
    def word(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_word(cls, word: str) -> "Outcome":
        return cls[word.strip().upper()]


class Protocol(enum.Enum):
    ANTIJAM = "antijam"
    DCF = "dcf"

    @classmethod
    def parse(cls, value) -> "Protocol":
        if isinstance(value, Protocol):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown protocol {value!r}; expected antijam or dcf") from None


class Observation(enum.Enum):
    IDLE = "idle"
    RECEIVED = "received"
    BUSY = "busy"


def resolve_slot(num_transmitters: int, jammed: bool) -> Outcome:
    if jammed:
        return Outcome.JAMMED
    if num_transmitters == 0:
        return Outcome.IDLE
    if num_transmitters == 1:
        return Outcome.SUCCESS
    return Outcome.COLLISION


def observe(outcome: Outcome, transmitted: bool) -> Optional[Observation]:
    """What a node senses in a slot. Transmitters get no feedback."""
    if transmitted:
        return None
    if outcome is Outcome.IDLE:
        return Observation.IDLE
    if outcome is Outcome.SUCCESS:
        return Observation.RECEIVED
    return Observation.BUSY


@dataclass(frozen=True)
class SlotRecord:
    t: int
    num_transmitters: int
    sender: Optional[int]
    jammed: bool
    outcome: Outcome
    cumulative_p: Optional[float] = None


@dataclass(frozen=True)
class SimConfig:
    n: int = 1000
    steps: int = 100_000
    seed: int = 0
    protocol: Protocol = Protocol.ANTIJAM
    adversary: AdversaryConfig = field(default_factory=AdversaryConfig)
    protocol_params: Union[ProtocolParams, DcfParams, None] = None

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        for name in ("n", "steps"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {v!r}")
            object.__setattr__(self, name, int(v))
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if not isinstance(self.adversary, AdversaryConfig):
            raise ConfigError("adversary must be an AdversaryConfig")
        expected = ProtocolParams if self.protocol is Protocol.ANTIJAM else DcfParams
        if self.protocol_params is None:
            object.__setattr__(self, "protocol_params", expected())
        elif not isinstance(self.protocol_params, expected):
            raise ConfigError(
                f"protocol {self.protocol.value} needs {expected.__name__}, "
                f"got {type(self.protocol_params).__name__}"
            )

    def to_dict(self) -> dict:
        """Flat, fully resolved field dictionary (the config-file format)."""
        out = {
            "n": self.n,
            "steps": self.steps,
            "seed": self.seed,
            "protocol": self.protocol.value,
            "T": self.adversary.T,
            "epsilon": self.adversary.epsilon,
            "strategy": self.adversary.strategy.label,
        }
        for f in fields(self.protocol_params):
            out[f.name] = getattr(self.protocol_params, f.name)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        known = {"n", "steps", "seed", "protocol", "T", "epsilon", "strategy",
                 "gamma", "p_hat", "initial_p", "initial_T", "cw_min", "cw_max"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        protocol = Protocol.parse(d.pop("protocol", Protocol.ANTIJAM))
        adv = AdversaryConfig(
            **{k: d.pop(k) for k in ("T", "epsilon", "strategy") if k in d}
        )
        ap = {k: d.pop(k) for k in ("gamma", "p_hat", "initial_p", "initial_T") if k in d}
        dp = {k: d.pop(k) for k in ("cw_min", "cw_max") if k in d}
        if protocol is Protocol.ANTIJAM:
            params = ProtocolParams(**ap)
        else:
            params = DcfParams(**dp)
        try:
            return cls(protocol=protocol, adversary=adv, protocol_params=params, **d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


TRACE_HEADER = ["t", "num_transmitters", "sender", "jammed", "outcome", "cumulative_p"]


@dataclass(frozen=True, eq=False)
class RunTrace:
    """Column-oriented run record; ``records`` materializes ``SlotRecord``s."""

    num_transmitters: np.ndarray
    sender: np.ndarray  # -1 where absent
    jammed: np.ndarray
    outcome: np.ndarray
    cumulative_p: Optional[np.ndarray]
    per_node_successes: np.ndarray
    config: Optional[SimConfig] = None

    def __post_init__(self):
        n_success = int(np.count_nonzero(self.outcome == Outcome.SUCCESS))
        if int(self.per_node_successes.sum()) != n_success:
            raise AssertionError("per-node successes do not add up to the Success slots")

    def __len__(self) -> int:
        return int(self.outcome.shape[0])

    def __getitem__(self, t: int) -> SlotRecord:
        s = int(self.sender[t])
        return SlotRecord(
            t=int(t) if t >= 0 else len(self) + int(t),
            num_transmitters=int(self.num_transmitters[t]),
            sender=None if s < 0 else s,
            jammed=bool(self.jammed[t]),
            outcome=Outcome(int(self.outcome[t])),
            cumulative_p=None if self.cumulative_p is None else float(self.cumulative_p[t]),
        )

    def __iter__(self) -> Iterator[SlotRecord]:
        for t in range(len(self)):
            yield self[t]

    @property
    def records(self) -> list[SlotRecord]:
        return list(self)

    def same_as(self, other: "RunTrace") -> bool:
        def eq(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and bool(np.array_equal(a, b))

        return all(
            eq(getattr(self, name), getattr(other, name))
            for name in ("num_transmitters", "sender", "jammed", "outcome",
                         "cumulative_p", "per_node_successes")
        )

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        words = [o.word for o in Outcome]
        cum = self.cumulative_p
        ntx = self.num_transmitters.tolist()
        snd = self.sender.tolist()
        jam = self.jammed.tolist()
        out = self.outcome.tolist()
        cp = cum.tolist() if cum is not None else None
        for t in range(len(self)):
            w.writerow((
                t,
                ntx[t],
                "" if snd[t] < 0 else snd[t],
                int(jam[t]),
                words[out[t]],
                "" if cp is None else f"{cp[t]:.17g}",
            ))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def read_trace_csv(path_or_buffer, n: Optional[int] = None) -> RunTrace:
    """Parse a trace CSV back into a ``RunTrace``.

    Per-node success counts are rebuilt from the sender column; pass ``n``
    to size the array when trailing nodes never succeeded.
    """
    if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
        with open(path_or_buffer, newline="") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(path_or_buffer))
    if not rows or rows[0] != TRACE_HEADER:
        raise ValueError("not a trace CSV (bad header)")
    rows = rows[1:]
    for i, row in enumerate(rows):
        if int(row[0]) != i:
            raise ValueError(f"row {i}: slot index {row[0]} out of order")
    ntx = np.array([int(r[1]) for r in rows], dtype=np.int64)
    sender = np.array([int(r[2]) if r[2] else -1 for r in rows], dtype=np.int64)
    jammed = np.array([r[3] in ("1", "true", "True") for r in rows], dtype=np.bool_)
    outcome = np.array([Outcome.from_word(r[4]) for r in rows], dtype=np.int8)
    has_cum = any(r[5] for r in rows)
    cum = np.array([float(r[5]) for r in rows], dtype=np.float64) if has_cum else None
    size = max(n or 0, int(sender.max()) + 1 if sender.size else 0)
    succ = np.bincount(sender[sender >= 0], minlength=size).astype(np.int64)
    return RunTrace(ntx, sender, jammed, outcome, cum, succ)


class _TraceBuffers:
    def __init__(self, steps: int, with_cum: bool):
        self.ntx = np.zeros(steps, dtype=np.int64)
        self.sender = np.full(steps, -1, dtype=np.int64)
        self.jam = np.zeros(steps, dtype=np.bool_)
        self.outcome = np.zeros(steps, dtype=np.int8)
        self.cum = np.zeros(steps, dtype=np.float64) if with_cum else None


class Simulator:
    """Array-backed run that can be advanced in chunks.

    ``initial_probs`` overrides the starting per-node access probabilities;
    with ``frozen=True`` node states never change (used to sample channel
    statistics at a fixed probability vector).
    """

    def __init__(self, config: SimConfig, initial_probs: Optional[Sequence[float]] = None,
                 frozen: bool = False):
        self.config = config
        self.t = 0
        n = config.n
        self.keys = np.array([rng.stream_key(config.seed, v) for v in range(n)], dtype=np.uint64)
        self.adv_key = np.uint64(rng.stream_key(config.seed, rng.ADVERSARY_STREAM))
        adv = config.adversary
        self.ring = np.zeros(adv.T, dtype=np.bool_)
        self.budget = np.zeros(2, dtype=np.int64)
        self.cap = adv.capacity
        self.one_minus_eps = 1.0 - adv.epsilon
        self.tx = np.zeros(n, dtype=np.bool_)
        self.successes = np.zeros(n, dtype=np.int64)
        self.frozen = frozen
        self._buf = _TraceBuffers(config.steps, config.protocol is Protocol.ANTIJAM)

        params = config.protocol_params
        if config.protocol is Protocol.ANTIJAM:
            if initial_probs is None:
                self.p = np.full(n, params.start_p, dtype=np.float64)
            else:
                self.p = np.array(initial_probs, dtype=np.float64)
                if self.p.shape != (n,) or np.any(self.p < 0) or np.any(self.p >= 1):
                    raise ConfigError("initial_probs must hold n values in [0, 1)")
            self.c = np.ones(n, dtype=np.int64)
            self.T = np.full(n, params.start_T, dtype=np.int64)
            self.last_idle = np.full(n, -1, dtype=np.int64)
        else:
            if initial_probs is not None or frozen:
                raise ConfigError("initial_probs/frozen are AntiJam-only")
            self.cw = np.full(n, params.cw_min, dtype=np.int64)
            self.backoff = np.array(
                [dcf.draw_backoff(params.cw_min, rng.uniform_at(int(k), 0)) for k in self.keys],
                dtype=np.int64,
            )
            self.draws = np.ones(n, dtype=np.int64)

    @property
    def remaining(self) -> int:
        return self.config.steps - self.t

    def step(self, k: int = 1) -> None:
        k = min(k, self.remaining)
        if k <= 0:
            return
        b, t0, cfg = self._buf, self.t, self.config
        sl = slice(t0, t0 + k)
        strategy = int(cfg.adversary.strategy)
        if cfg.protocol is Protocol.ANTIJAM:
            prm = cfg.protocol_params
            _kernel.antijam_steps(
                t0, k, self.keys, self.adv_key,
                self.p, self.c, self.T, self.last_idle, self.tx, self.successes,
                self.ring, self.budget, self.cap, strategy, self.one_minus_eps,
                1.0 + prm.gamma, prm.p_hat, self.frozen,
                b.ntx[sl], b.sender[sl], b.jam[sl], b.outcome[sl], b.cum[sl],
            )
        else:
            prm = cfg.protocol_params
            _kernel.dcf_steps(
                t0, k, self.keys, self.adv_key,
                self.cw, self.backoff, self.draws, self.tx, self.successes,
                self.ring, self.budget, self.cap, strategy, self.one_minus_eps,
                prm.cw_min, prm.cw_max,
                b.ntx[sl], b.sender[sl], b.jam[sl], b.outcome[sl],
            )
        self.t += k

    def run(self) -> RunTrace:
        self.step(self.remaining)
        return self.trace()

    def trace(self) -> RunTrace:
        b, t = self._buf, self.t
        return RunTrace(
            b.ntx[:t].copy(), b.sender[:t].copy(), b.jam[:t].copy(), b.outcome[:t].copy(),
            None if b.cum is None else b.cum[:t].copy(),
            self.successes.copy(), self.config,
        )

    def node_states(self) -> list[antijam.NodeState]:
        return [
            antijam.NodeState(float(p), int(c), int(T), int(li))
            for p, c, T, li in zip(self.p, self.c, self.T, self.last_idle)
        ]

    def write_snapshot(self, writer) -> None:
        """Append ``t,node_id,p_v,c_v,T_v`` rows for the current slot index."""
        for v in range(self.config.n):
            writer.writerow((self.t, v, f"{self.p[v]:.17g}", int(self.c[v]), int(self.T[v])))


SNAPSHOT_HEADER = ["t", "node_id", "p_v", "c_v", "T_v"]


class ReferenceSimulator:
    """Per-node Python objects driven by the pure transition functions.

    Accepts an optional ``jam_policy`` replacing the configured strategy; it
    sees the whole history so far and the budget is still enforced.
    """

    def __init__(self, config: SimConfig, jam_policy: Optional[JamPolicy] = None):
        self.config = config
        self.t = 0
        n = config.n
        self.streams = [rng.rng_stream(config.seed, v) for v in range(n)]
        self.adv_stream = rng.rng_stream(config.seed, rng.ADVERSARY_STREAM)
        self.budget = AdversaryBudget(config.adversary.T, config.adversary.epsilon)
        self.jam_policy = jam_policy
        self.history = JamHistory([], [])
        self.records: list[SlotRecord] = []
        self.successes = [0] * n
        params = config.protocol_params
        if config.protocol is Protocol.ANTIJAM:
            self.nodes = [antijam.initial_state(params) for _ in range(n)]
        else:
            self.nodes = [dcf.fresh_state(params, s.at(0)) for s in self.streams]

    def _jam(self, active: bool) -> bool:
        view = PreSlotView(active)
        if self.jam_policy is None:
            coin = self.adv_stream.at(self.t)
            return decide(self.config.adversary.strategy, view, self.budget, coin)
        wanted = bool(self.jam_policy(view, self.budget, self.history))
        return wanted and self.budget.allows()

    def step(self) -> SlotRecord:
        cfg, t = self.config, self.t
        params = cfg.protocol_params
        if cfg.protocol is Protocol.ANTIJAM:
            cum = 0.0
            for node in self.nodes:
                cum += node.p
            beacons = [antijam.decide_transmit(node, s.at(t)) for node, s in zip(self.nodes, self.streams)]
            sending = [b is not None for b in beacons]
        else:
            cum = None
            sending = [dcf.dcf_decide(node) for node in self.nodes]
        ntx = sum(sending)
        jam = self._jam(ntx > 0)
        self.budget.record_and_slide(jam)
        outcome = resolve_slot(ntx, jam)
        sender = sending.index(True) if outcome is Outcome.SUCCESS else None
        if sender is not None:
            self.successes[sender] += 1

        new_nodes = []
        for v, node in enumerate(self.nodes):
            obs = observe(outcome, sending[v])
            if cfg.protocol is Protocol.ANTIJAM:
                if obs is Observation.IDLE:
                    node = antijam.on_idle(node, params, t)
                elif obs is Observation.RECEIVED:
                    node = antijam.on_receive(node, beacons[sender], params)
                node = antijam.end_of_slot(node, params, t)
            else:
                if sending[v]:
                    view = dcf.SlotView.MY_SUCCESS if outcome is Outcome.SUCCESS else dcf.SlotView.MY_FAILURE
                elif obs is Observation.IDLE:
                    view = dcf.SlotView.IDLE_OBSERVED
                else:
                    view = dcf.SlotView.BUSY_OBSERVED
                node = dcf.dcf_update(node, view, params, self.streams[v])
            new_nodes.append(node)
        self.nodes = new_nodes

        rec = SlotRecord(t, ntx, sender, jam, outcome, cum)
        self.records.append(rec)
        self.history.num_transmitters.append(ntx)
        self.history.jammed.append(jam)
        self.t += 1
        return rec

    def run(self) -> RunTrace:
        while self.t < self.config.steps:
            self.step()
        return self.trace()

    def trace(self) -> RunTrace:
        recs = self.records
        cum = None
        if self.config.protocol is Protocol.ANTIJAM:
            cum = np.array([r.cumulative_p for r in recs], dtype=np.float64)
        return RunTrace(
            np.array([r.num_transmitters for r in recs], dtype=np.int64),
            np.array([-1 if r.sender is None else r.sender for r in recs], dtype=np.int64),
            np.array([r.jammed for r in recs], dtype=np.bool_),
            np.array([int(r.outcome) for r in recs], dtype=np.int8),
            cum,
            np.array(self.successes, dtype=np.int64),
            self.config,
        )


def run(config: SimConfig, backend: str = "fast", jam_policy: Optional[JamPolicy] = None) -> RunTrace:
    if jam_policy is not None or backend == "reference":
        return ReferenceSimulator(config, jam_policy).run()
    if backend != "fast":
        raise ConfigError(f"unknown backend {backend!r}")
    return Simulator(config).run()


def sample_frozen(probs: Sequence[float], steps: int, seed: int = 0) -> RunTrace:
    """NoJam slots drawn at a fixed probability vector (states never update)."""
    probs = np.asarray(probs, dtype=np.float64)
    p_hat = max(float(probs.max()), 1e-12) if probs.size else 1e-12
    cfg = SimConfig(
        n=len(probs), steps=steps, seed=seed,
        adversary=AdversaryConfig(T=1, epsilon=1.0, strategy=Strategy.NONE),
        protocol_params=_quiet_params(p_hat),
    )
    return Simulator(cfg, initial_probs=probs, frozen=True).run()


def _quiet_params(p_hat: float) -> ProtocolParams:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", antijam.OutsideAnalyzedRegime)
        return ProtocolParams(p_hat=min(p_hat, 1 - 1e-12))
