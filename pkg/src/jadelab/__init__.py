"""Simulation lab for the JADE jamming-resistant MAC protocol on unit disk graphs."""
from .adversary import AdversaryBudget, audit, audit_masks
from .config import AdversarySpec, ExperimentConfig, TopologySpec
from .engine import resolve_round, run
from .exceptions import ConfigError, TraceError
from .metrics import competitiveness, interval_stats
from .protocol import Event, NodeState, Observation, ProtocolParams
from .topology import build_udg, place_explicit, place_gaussian, place_uniform

__version__ = "0.1.0"

__all__ = [
    "AdversaryBudget", "AdversarySpec", "ConfigError", "Event", "ExperimentConfig",
    "NodeState", "Observation", "ProtocolParams", "TopologySpec", "TraceError",
    "audit", "audit_masks", "build_udg", "competitiveness", "interval_stats",
    "place_explicit", "place_gaussian", "place_uniform", "resolve_round", "run",
]
