"""Reactive jammers bounded to ``floor((1 - epsilon) * T)`` jams per ``T`` slots."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .antijam import ConfigError


class Strategy(enum.IntEnum):
    NONE = 0
    BUSY_PROB = 1
    BUSY_DET = 2
    IDLE_DET = 3

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, value) -> "Strategy":
        if isinstance(value, Strategy):
            return value
        try:
            return _BY_LABEL[str(value).strip().lower()]
        except KeyError:
            raise ConfigError(
                f"unknown strategy {value!r}; expected one of {sorted(_BY_LABEL)}"
            ) from None


_LABELS = {
    Strategy.NONE: "none",
    Strategy.BUSY_PROB: "busy-prob",
    Strategy.BUSY_DET: "busy-det",
    Strategy.IDLE_DET: "idle-det",
}
_BY_LABEL = {v: k for k, v in _LABELS.items()}


def jam_capacity(T: int, epsilon: float) -> int:
    # The 1e-9 nudge keeps e.g. (1 - 0.9) * 100 = 9.999999999999998 at 10.
    return int(math.floor((1.0 - epsilon) * T + 1e-9))


@dataclass(frozen=True)
class AdversaryConfig:
    T: int = 100
    epsilon: float = 0.5
    strategy: Strategy = Strategy.BUSY_DET

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if int(self.T) != self.T or self.T < 1:
            raise ConfigError(f"T must be an integer >= 1, got {self.T}")
        object.__setattr__(self, "T", int(self.T))
        if not 0 < self.epsilon <= 1:
            raise ConfigError(f"epsilon must lie in (0, 1], got {self.epsilon}")

    @property
    def capacity(self) -> int:
        return jam_capacity(self.T, self.epsilon)


@dataclass(frozen=True)
class PreSlotView:
    active: bool


class AdversaryBudget:
    """Jam flags of the last ``T`` slots in a ring buffer.

    The window starts all-false, so the jammer begins with its full budget.
    """

    def __init__(self, T: int, epsilon: float):
        self.T = T
        self.epsilon = epsilon
        self.capacity = jam_capacity(T, epsilon)
        self.window = [False] * T
        self.pos = 0
        self.jam_count = 0

    def window_count(self) -> int:
        """Jams among the ``T - 1`` most recent slots, i.e. the window ending now."""
        return self.jam_count - self.window[self.pos]

    def allows(self) -> bool:
        return self.window_count() < self.capacity

    def record_and_slide(self, jam: bool) -> "AdversaryBudget":
        self.jam_count -= self.window[self.pos]
        self.window[self.pos] = bool(jam)
        self.jam_count += bool(jam)
        self.pos = (self.pos + 1) % self.T
        return self

    def flags(self) -> list[bool]:
        """Window contents, oldest first."""
        return self.window[self.pos :] + self.window[: self.pos]


def decide(
    strategy: Strategy,
    view: PreSlotView,
    budget: AdversaryBudget,
    coin: float,
) -> bool:
    """Jam decision for one slot.

    ``coin`` is the adversary's uniform draw for the slot; only the
    probabilistic strategy looks at it, jamming when ``coin < 1 - epsilon``.
    """
    if not budget.allows():
        return False
    if strategy == Strategy.BUSY_DET:
        return view.active
    if strategy == Strategy.IDLE_DET:
        return not view.active
    if strategy == Strategy.BUSY_PROB:
        return view.active and coin < 1.0 - budget.epsilon
    return False


# A custom jammer sees the pre-slot view, the budget and the trace so far
# (``JamHistory``); the engine still enforces the budget on its answer.
JamPolicy = Callable[[PreSlotView, AdversaryBudget, "JamHistory"], bool]


@dataclass
class JamHistory:
    num_transmitters: list
    jammed: list


def window_violations(jammed: Sequence[bool], T: int, epsilon: float) -> int:
    """Number of length-``T`` windows holding more than the allowed jams.

    Traces shorter than ``T`` are scanned as a single (partial) window.
    """
    flags = np.asarray(jammed, dtype=np.int64)
    cap = jam_capacity(T, epsilon)
    if flags.size == 0:
        return 0
    if flags.size < T:
        return int(flags.sum() > cap)
    csum = np.concatenate(([0], np.cumsum(flags)))
    counts = csum[T:] - csum[:-T]
    return int(np.count_nonzero(counts > cap))


def long_window_violations(jammed: Sequence[bool], T: int, epsilon: float, widths: Sequence[int]) -> int:
    """Weaker check for windows ``w >= T``: at most ``(1 - epsilon) * (w + T)`` jams."""
    flags = np.asarray(jammed, dtype=np.int64)
    csum = np.concatenate(([0], np.cumsum(flags)))
    bad = 0
    for w in widths:
        if w > flags.size:
            continue
        counts = csum[w:] - csum[:-w]
        bad += int(np.count_nonzero(counts > (1.0 - epsilon) * (w + T) + 1e-9))
    return bad
