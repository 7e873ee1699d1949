"""Slotted-channel simulator for the AntiJam MAC protocol under reactive jamming."""

from .adversary import AdversaryConfig, Strategy
from .antijam import ConfigError, ProtocolParams
from .dcf import DcfParams
from .engine import Outcome, Protocol, RunTrace, SimConfig, Simulator, run

__all__ = [
    "AdversaryConfig",
    "ConfigError",
    "DcfParams",
    "Outcome",
    "Protocol",
    "ProtocolParams",
    "RunTrace",
    "SimConfig",
    "Simulator",
    "Strategy",
    "run",
]
