"""AntiJam per-node state machine.

Nodes send with probability ``p_v`` and piggyback their ``(p_v, c_v, T_v)``
on every message. Listeners raise ``p_v`` by a factor ``1 + gamma`` on idle
slots and adopt the sender's state (one factor lower) on receptions. Every
``T_v`` slots a node without a recently observed idle slot lowers ``p_v`` and
widens its window by two.

The functions below are pure transitions on immutable ``NodeState`` values.
They are the readable definition of the protocol; the compiled slot loop in
``_kernel`` must reproduce them bit for bit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

ANALYZED_P_HAT_MAX = 1.0 / 24.0


class ConfigError(ValueError):
    """Raised for invalid simulation parameters."""


class OutsideAnalyzedRegime(UserWarning):
    pass


@dataclass(frozen=True)
class ProtocolParams:
    gamma: float = 0.1
    p_hat: float = 1.0 / 24.0
    initial_p: Optional[float] = None
    initial_T: Optional[int] = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")
        if not 0 < self.p_hat < 1:
            raise ConfigError(f"p_hat must lie in (0, 1), got {self.p_hat}")
        if self.initial_p is not None and not 0 < self.initial_p <= self.p_hat:
            raise ConfigError(f"initial_p must lie in (0, p_hat], got {self.initial_p}")
        if self.initial_T is not None and (int(self.initial_T) != self.initial_T or self.initial_T < 1):
            raise ConfigError(f"initial_T must be an integer >= 1, got {self.initial_T}")
        if self.p_hat > ANALYZED_P_HAT_MAX * (1 + 1e-12):
            warnings.warn(
                f"p_hat={self.p_hat} is above 1/24, outside the analyzed regime",
                OutsideAnalyzedRegime,
                stacklevel=3,
            )

    @property
    def start_p(self) -> float:
        return self.p_hat if self.initial_p is None else self.initial_p

    @property
    def start_T(self) -> int:
        return 1 if self.initial_T is None else int(self.initial_T)

    @property
    def growth(self) -> float:
        return 1.0 + self.gamma


@dataclass(frozen=True)
class NodeState:
    p: float
    c: int = 1
    T: int = 1
    # Slot index of the most recent locally observed idle slot, -1 if none.
    last_idle: int = -1

    def idle_within(self, t: int, window: int) -> bool:
        """True if an idle slot was observed among slots ``t - window + 1 .. t``."""
        return self.last_idle >= 0 and t - self.last_idle < window


@dataclass(frozen=True)
class Beacon:
    p_new: float
    c_new: int
    T_new: int


def initial_state(params: ProtocolParams) -> NodeState:
    return NodeState(p=params.start_p, c=1, T=params.start_T)


def decide_transmit(state: NodeState, u: float) -> Optional[Beacon]:
    """Return the beacon to send, or ``None`` to listen.

    ``u`` is the node's uniform draw for this slot; the node sends iff
    ``u < p_v``, i.e. with probability exactly ``p_v``.
    """
    if u < state.p:
        return Beacon(state.p, state.c, state.T)
    return None


def on_idle(state: NodeState, params: ProtocolParams, t: int) -> NodeState:
    return replace(
        state,
        p=min(params.growth * state.p, params.p_hat),
        T=max(1, state.T - 1),
        last_idle=t,
    )


def on_receive(state: NodeState, beacon: Beacon, params: ProtocolParams) -> NodeState:
    return replace(state, p=beacon.p_new / params.growth, c=beacon.c_new, T=beacon.T_new)


def end_of_slot(state: NodeState, params: ProtocolParams, t: int, idle_now: bool = False) -> NodeState:
    """Counter step and window-threshold rule, run by every node every slot.

    ``on_idle`` already records slot ``t`` as idle, so ``idle_now`` is only
    needed when the observation update was skipped. Transmitters pass False.
    """
    if idle_now:
        state = replace(state, last_idle=t)
    c = state.c + 1
    if c <= state.T:
        return replace(state, c=c)
    if state.idle_within(t, state.T):
        return replace(state, c=1)
    return replace(state, c=1, p=state.p / params.growth, T=state.T + 2)
