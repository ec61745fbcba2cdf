"""Deterministic discrete-event network simulator for block relay."""

from .topology import Topology, generate_topology, linear_topology
from .mining import mining_schedule
from .scenario import Scenario, linear_scenario
from .sim import Simulation, RunResult, build_topology

__all__ = [
    "Topology",
    "generate_topology",
    "linear_topology",
    "mining_schedule",
    "Scenario",
    "linear_scenario",
    "Simulation",
    "RunResult",
    "build_topology",
]
