"""Exact decision analysis over influence diagrams.

The package solves discrete influence diagrams exactly (optimal policy and
expected utility), focuses attention through sensitivity analyses, and
drives schema-based interactive consultations over a small HTTP service
and CLI.
"""

from .diagram import (
    ChanceNode,
    DecisionNode,
    InfluenceDiagram,
    ValidationReport,
    ValueNode,
    Variable,
    canonicalize,
    topological_order,
    validate,
)
from .errors import DomainError
from .oracle import evaluate_policy, solve_oracle
from .sensitivity import ParamRef, evpi, sweep, thresholds, tornado
from .solver import SolveResult, eliminate_barren, reverse_arc, solve

__all__ = [
    "ChanceNode",
    "DecisionNode",
    "DomainError",
    "InfluenceDiagram",
    "ParamRef",
    "SolveResult",
    "ValidationReport",
    "ValueNode",
    "Variable",
    "canonicalize",
    "eliminate_barren",
    "evaluate_policy",
    "evpi",
    "reverse_arc",
    "solve",
    "solve_oracle",
    "sweep",
    "thresholds",
    "topological_order",
    "tornado",
    "validate",
]

__version__ = "0.1.0"
