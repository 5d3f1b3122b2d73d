"""Routing with time windows where inter-region edges need a scheduled carrier.

Toolkit pieces: instance model and generators, preprocessing and MIP text
emission for external solvers, an exact LP schedule optimizer, a multi-start
insertion heuristic, a brute-force oracle for tiny instances, and a
benchmark/report harness.
"""

from .model import (
    ArcSets,
    Instance,
    InsertionCandidate,
    Machine,
    Solution,
    Travel,
    Vehicle,
    Visit,
    classify_arcs,
    machine_edge_bound,
    solution_cost,
)
from .validate import ValidationReport, validate

__version__ = "0.1.0"

__all__ = [
    "ArcSets",
    "Instance",
    "InsertionCandidate",
    "Machine",
    "Solution",
    "Travel",
    "Vehicle",
    "Visit",
    "classify_arcs",
    "machine_edge_bound",
    "solution_cost",
    "validate",
    "ValidationReport",
    "__version__",
]
