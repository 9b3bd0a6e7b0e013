"""Brute-force reference solver, independent of the elimination engine.

Enumerates every deterministic policy and computes its expected utility by
summing utility times joint probability over all chance-outcome combinations.
Exponential on purpose: its only job is to verify the real solver on small
diagrams, so it shares no code path with node elimination or arc reversal.
"""

from __future__ import annotations

import itertools

from .diagram import (
    ChanceNode,
    InfluenceDiagram,
    Row,
    clamp01,
    decision_order,
    project,
    row_keys,
    topological_order,
)
from .errors import DomainError
from .solver import Policy, SolveResult

MAX_POLICIES = 10**6
MAX_JOINT_STATES = 10**5


def policy_slots(diagram: InfluenceDiagram) -> list[tuple[str, Row]]:
    """Every (decision, information state) pair needing a choice, in
    temporal order then canonical row order."""
    slots: list[tuple[str, Row]] = []
    for name in decision_order(diagram):
        node = diagram.node(name)
        for key in row_keys(diagram, node.predecessors):
            slots.append((name, key))
    return slots


def _guard_sizes(diagram: InfluenceDiagram) -> None:
    policies = 1
    for name in decision_order(diagram):
        node = diagram.node(name)
        states = 1
        for p in node.predecessors:
            states *= len(diagram.outcomes_of(p))
        policies *= len(node.alternatives) ** states
        if policies > MAX_POLICIES:
            raise DomainError(
                "TOO_LARGE", f"more than {MAX_POLICIES} policies to enumerate"
            )
    joint = 1
    for node in diagram.chance_nodes:
        joint *= len(node.outcomes)
        if joint > MAX_JOINT_STATES:
            raise DomainError(
                "TOO_LARGE", f"more than {MAX_JOINT_STATES} joint chance states"
            )


def evaluate_policy(diagram: InfluenceDiagram, policy: Policy) -> float:
    """Expected utility of a fixed policy, by exhaustive enumeration.

    Walks every combination of chance outcomes; decision values are filled
    in topological order from the policy at the realized information state,
    so the probability of each combination is the product of the CPT entries
    it selects.
    """
    order = topological_order(diagram)
    value = diagram.value_node()
    chance_names = [n for n in order if isinstance(diagram.node(n), ChanceNode)]
    domains = [diagram.outcomes_of(n) for n in chance_names]
    steps = [(name, diagram.node(name)) for name in order if name != value.name]

    total = 0.0
    for combo in itertools.product(*domains):
        assignment = dict(zip(chance_names, combo))
        probability = 1.0
        for name, node in steps:
            if isinstance(node, ChanceNode):
                row = node.table[project(assignment, node.predecessors)]
                probability *= clamp01(row[node.variable.index_of(assignment[name])])
                if probability == 0.0:
                    break
            else:
                choice = policy[name][project(assignment, node.predecessors)]
                assignment[name] = node.alternatives[choice]
        else:
            total += probability * value.utilities[project(assignment, value.predecessors)]
    return total


def solve_oracle(diagram: InfluenceDiagram) -> SolveResult:
    """Maximize expected utility over every deterministic policy.

    Ties go to the policy enumerated first, which is the lexicographically
    first choice vector over the slot list.
    """
    _guard_sizes(diagram)
    slots = policy_slots(diagram)
    choice_counts = [len(diagram.node(name).alternatives) for name, _ in slots]

    best_eu: float | None = None
    best_policy: Policy = {}
    for choices in itertools.product(*(range(c) for c in choice_counts)):
        policy: Policy = {}
        for (name, key), choice in zip(slots, choices):
            policy.setdefault(name, {})[key] = choice
        eu = evaluate_policy(diagram, policy)
        if best_eu is None or eu > best_eu:
            best_eu, best_policy = eu, policy
    # itertools.product over zero slots yields one empty policy, so best_eu
    # is always set, including for diagrams without decisions.
    assert best_eu is not None
    return SolveResult(best_eu, best_policy, ())
