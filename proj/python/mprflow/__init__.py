"""Throughput-optimal multipath rate allocation for random-access wireless
networks with multi-packet reception."""

from ._mprflow import (
    AllocationProblem,
    ContractViolation,
    IntractableEnumeration,
    Scenario,
    ScenarioError,
    __version__,
    aggregate_throughput,
    link_throughput,
    nonconvexity_condition,
    path_throughput,
    rx_power_factor,
    simulate,
    solve,
    solve_best_path,
    success_probability,
)

__all__ = [
    "AllocationProblem",
    "ContractViolation",
    "IntractableEnumeration",
    "Scenario",
    "ScenarioError",
    "__version__",
    "aggregate_throughput",
    "link_throughput",
    "nonconvexity_condition",
    "path_throughput",
    "rx_power_factor",
    "simulate",
    "solve",
    "solve_best_path",
    "success_probability",
]
