"""Throughput, convergence, band occupancy and fairness summaries."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .engine import Outcome, Protocol, RunTrace, SimConfig

CumulativeInput = Union[RunTrace, Sequence[float], np.ndarray]


class UnsupportedMetricError(ValueError):
    pass


class Throughput(NamedTuple):
    value: float
    all_jammed: bool


def outcome_counts(trace: RunTrace) -> np.ndarray:
    return np.bincount(trace.outcome.astype(np.int64), minlength=len(Outcome))


def throughput(trace: RunTrace, start: int = 0) -> Throughput:
    """Successes over non-jammed slots, from slot ``start`` on."""
    if len(trace) == 0:
        raise ValueError("throughput of an empty trace")
    counts = np.bincount(trace.outcome[start:].astype(np.int64), minlength=len(Outcome))
    non_jammed = int(counts.sum() - counts[Outcome.JAMMED])
    if non_jammed == 0:
        return Throughput(0.0, True)
    return Throughput(int(counts[Outcome.SUCCESS]) / non_jammed, False)


def _cumulative(trace: CumulativeInput) -> np.ndarray:
    if isinstance(trace, RunTrace):
        if trace.cumulative_p is None:
            raise UnsupportedMetricError("trace carries no cumulative probability (DCF run?)")
        return trace.cumulative_p
    return np.asarray(trace, dtype=np.float64)


def convergence_slot(trace: CumulativeInput, lower: float = 0.1, upper: float = 10.0,
                     k: int = 5) -> Optional[int]:
    """First slot starting ``k`` consecutive slots with cumulative p in [lower, upper]."""
    cum = _cumulative(trace)
    if k < 1:
        raise ValueError("k must be >= 1")
    inside = ((cum >= lower) & (cum <= upper)).astype(np.int64)
    if inside.size < k:
        return None
    csum = np.concatenate(([0], np.cumsum(inside)))
    hits = np.flatnonzero(csum[k:] - csum[:-k] == k)
    return int(hits[0]) if hits.size else None


def band_fraction(trace: CumulativeInput, epsilon: float) -> float:
    """Share of slots with cumulative p in [1/(2 eps), 2/eps]."""
    cum = _cumulative(trace)
    if cum.size == 0:
        return 0.0
    inside = (cum >= 1.0 / (2.0 * epsilon)) & (cum <= 2.0 / epsilon)
    return float(np.count_nonzero(inside) / cum.size)


def _successes(x) -> np.ndarray:
    if isinstance(x, RunTrace):
        return x.per_node_successes
    return np.asarray(x, dtype=np.int64)


def fairness_histogram(successes, bin_size: int = 4) -> dict[tuple[int, int], int]:
    """Nodes per success-count interval ``[k*bin, (k+1)*bin)``; empty bins omitted."""
    if bin_size < 1:
        raise ValueError("bin_size must be >= 1")
    s = _successes(successes)
    bins = np.bincount(s // bin_size) if s.size else np.zeros(0, dtype=np.int64)
    return {(k * bin_size, (k + 1) * bin_size): int(c) for k, c in enumerate(bins) if c}


def jain_index(successes) -> float:
    x = _successes(successes).astype(np.float64)
    if x.size == 0:
        raise ValueError("jain index needs at least one node")
    sq = float(np.dot(x, x))
    if sq == 0.0:
        return 1.0
    return float(x.sum() ** 2 / (x.size * sq))


def coefficient_of_variation(successes) -> float:
    x = _successes(successes).astype(np.float64)
    mean = x.mean()
    return float(x.std() / mean) if mean > 0 else math.inf


def _histogram_to_json(h: dict) -> dict:
    return {f"[{lo},{hi})": c for (lo, hi), c in h.items()}


def _histogram_from_json(h: dict) -> dict:
    out = {}
    for key, c in h.items():
        lo, hi = key.strip("[)").split(",")
        out[(int(lo), int(hi))] = int(c)
    return out


@dataclass
class MetricsReport:
    throughput: float
    non_jammed: int
    successes: int
    convergence_slot: Optional[int]
    band_fraction: Optional[float]
    fairness_histogram: dict
    jain_index: float
    all_jammed: bool = False
    throughput_post_convergence: Optional[float] = None
    config: dict = field(default_factory=dict)

    SCALARS = ("throughput", "throughput_post_convergence", "non_jammed", "successes",
               "convergence_slot", "band_fraction", "jain_index", "all_jammed")

    def to_json(self) -> str:
        d = asdict(self)
        d["fairness_histogram"] = _histogram_to_json(self.fairness_histogram)
        return json.dumps(d, indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        d = json.loads(text)
        d["fairness_histogram"] = _histogram_from_json(d["fairness_histogram"])
        return cls(**d)

    def scalars(self) -> dict:
        return {k: getattr(self, k) for k in self.SCALARS}


def report(trace: RunTrace, config: Optional[SimConfig] = None) -> MetricsReport:
    config = config or trace.config
    counts = outcome_counts(trace)
    thr = throughput(trace)
    conv = band = post = None
    if trace.cumulative_p is not None:
        conv = convergence_slot(trace)
        if config is not None:
            band = band_fraction(trace, config.adversary.epsilon)
        if conv is not None:
            post = throughput(trace, start=conv).value
    elif config is not None and config.protocol is not Protocol.DCF:
        raise ValueError("AntiJam trace without cumulative probabilities")
    return MetricsReport(
        throughput=float(thr.value),
        non_jammed=int(counts.sum() - counts[Outcome.JAMMED]),
        successes=int(counts[Outcome.SUCCESS]),
        convergence_slot=conv,
        band_fraction=band,
        fairness_histogram=fairness_histogram(trace),
        jain_index=jain_index(trace),
        all_jammed=thr.all_jammed,
        throughput_post_convergence=post,
        config=config.to_dict() if config is not None else {},
    )
