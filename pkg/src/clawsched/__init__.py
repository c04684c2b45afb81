"""Conflict graphs, claw-free scheduling and multicast rates for wireless ad hoc networks."""

from .conflict import (
    ConflictGraph,
    Transmission,
    build_conflict_graph,
    build_orthogonal_graph,
    conflict_predicate,
    enumerate_transmissions,
    to_dot,
)
from .errors import (
    CapExceededError,
    ClawschedError,
    DomainError,
    InputError,
    NotClawFreeError,
    ScenarioViolationError,
)
from .graphcore import (
    ClawWitness,
    complement,
    enumerate_maximal_independent_sets,
    find_claw,
    is_independent,
)
from .mwis import MwisResult, mwis_clawfree, mwis_exact
from .netmodel import (
    Hypergraph,
    Network,
    Node,
    Scenario,
    load_network,
    neighbors,
    parse_network,
    validate_scenario,
)
from .rate import RateInstance, RateSolution, max_rate, verify_solution

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "ClawWitness",
    "ClawschedError",
    "ConflictGraph",
    "DomainError",
    "Hypergraph",
    "InputError",
    "MwisResult",
    "Network",
    "Node",
    "NotClawFreeError",
    "RateInstance",
    "RateSolution",
    "Scenario",
    "ScenarioViolationError",
    "Transmission",
    "build_conflict_graph",
    "build_orthogonal_graph",
    "complement",
    "conflict_predicate",
    "enumerate_maximal_independent_sets",
    "enumerate_transmissions",
    "find_claw",
    "is_independent",
    "load_network",
    "max_rate",
    "mwis_clawfree",
    "mwis_exact",
    "neighbors",
    "parse_network",
    "to_dot",
    "validate_scenario",
    "verify_solution",
]
