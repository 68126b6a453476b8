"""Attack path enumeration over Blackboard-style container/link/rule networks."""

from .engine import EnumerationResult, RealityPath, RunConfig, Stats, enumerate_paths
from .filters import Filter, apply_filters
from .fixtures import FixtureId, builtin_model
from .model import EntityId, Kind, NetworkModel, validate_model
from .modelfmt import ParseError, parse_filters, parse_model, serialize_model
from .pathchain import Hop, PathRecord, parse_record, serialize_record

__all__ = [
    "EntityId",
    "EnumerationResult",
    "Filter",
    "FixtureId",
    "Hop",
    "Kind",
    "NetworkModel",
    "ParseError",
    "PathRecord",
    "RealityPath",
    "RunConfig",
    "Stats",
    "apply_filters",
    "builtin_model",
    "enumerate_paths",
    "parse_filters",
    "parse_model",
    "parse_record",
    "serialize_model",
    "serialize_record",
    "validate_model",
]
