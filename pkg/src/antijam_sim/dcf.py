"""Slotted binary-exponential backoff (simplified 802.11 DCF).

No inter-frame spacing, RTS/CTS or ACK frames. The simulator hands each
transmitter its ground-truth outcome as an abstract immediate ACK, which is
the most favourable feedback the baseline could get.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .antijam import ConfigError


@dataclass(frozen=True)
class DcfParams:
    cw_min: int = 15
    cw_max: int = 1023

    def __post_init__(self):
        for name in ("cw_min", "cw_max"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {v}")
            object.__setattr__(self, name, int(v))
        if self.cw_max < self.cw_min:
            raise ConfigError(f"cw_max ({self.cw_max}) < cw_min ({self.cw_min})")


@dataclass(frozen=True)
class DcfNodeState:
    cw: int
    backoff: int
    # Number of uniforms this node has consumed from its stream.
    draws: int = 0


class SlotView(enum.Enum):
    IDLE_OBSERVED = "idle"
    BUSY_OBSERVED = "busy"
    MY_SUCCESS = "success"
    MY_FAILURE = "failure"


def draw_backoff(cw: int, u: float) -> int:
    return int(u * (cw + 1))


def fresh_state(params: DcfParams, u: float) -> DcfNodeState:
    return DcfNodeState(cw=params.cw_min, backoff=draw_backoff(params.cw_min, u), draws=1)


def dcf_decide(state: DcfNodeState) -> bool:
    return state.backoff == 0


def dcf_update(state: DcfNodeState, slot: SlotView, params: DcfParams, stream) -> DcfNodeState:
    """Advance one node by one slot.

    ``stream`` only needs ``at(counter)``; the node consumes uniform number
    ``state.draws`` whenever it redraws its backoff.
    """
    if slot is SlotView.IDLE_OBSERVED:
        return DcfNodeState(state.cw, max(state.backoff - 1, 0), state.draws)
    if slot is SlotView.BUSY_OBSERVED:
        return state
    if slot is SlotView.MY_SUCCESS:
        cw = params.cw_min
    else:
        cw = min(2 * state.cw + 1, params.cw_max)
    return DcfNodeState(cw, draw_backoff(cw, stream.at(state.draws)), state.draws + 1)
