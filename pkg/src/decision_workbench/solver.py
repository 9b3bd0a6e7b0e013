"""Exact influence-diagram evaluation by node elimination with arc reversal.

The solver repeatedly simplifies a valid, canonicalized diagram until only
the value node remains:

1. remove barren nodes (non-value nodes with no successors),
2. absorb into the value node any chance node whose only successor is the
   value node (expectation),
3. remove the temporally last decision when the value node is its only
   successor and every other direct value predecessor is known to it
   (maximization, recording the argmax per information state),
4. otherwise pick a chance value-predecessor whose arcs block case 2 and
   reverse them (Bayes' rule) until the value node is its only successor.

Every choice point breaks ties lexicographically by node name, so identical
inputs produce identical results, including the elimination trace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .diagram import (
    ChanceNode,
    DecisionNode,
    InfluenceDiagram,
    Row,
    ValueNode,
    clamp01,
    decision_order,
    project,
    row_keys,
    topological_order,
)
from .errors import DomainError


@dataclass(frozen=True)
class BarrenRemoval:
    node: str


@dataclass(frozen=True)
class ArcReversal:
    source: str
    target: str


@dataclass(frozen=True)
class ChanceRemoval:
    node: str


@dataclass(frozen=True)
class DecisionRemoval:
    node: str


Step = BarrenRemoval | ArcReversal | ChanceRemoval | DecisionRemoval

# A policy maps, per decision node, each information state (a row over the
# decision's canonical predecessors) to the index of the chosen alternative.
Policy = dict[str, dict[Row, int]]


@dataclass(frozen=True)
class SolveResult:
    expected_utility: float
    policy: Policy
    trace: tuple[Step, ...]


def describe_step(step: Step) -> str:
    if isinstance(step, BarrenRemoval):
        return f"removed barren node '{step.node}'"
    if isinstance(step, ArcReversal):
        return f"reversed arc '{step.source}' -> '{step.target}'"
    if isinstance(step, ChanceRemoval):
        return f"took the expectation over chance node '{step.node}'"
    return f"maximized over decision '{step.node}'"


def _merge_predecessors(first: tuple[str, ...], second: tuple[str, ...],
                        exclude: set[str]) -> tuple[str, ...]:
    merged: list[str] = []
    for name in itertools.chain(first, second):
        if name not in exclude and name not in merged:
            merged.append(name)
    return tuple(merged)


def reverse_arc(diagram: InfluenceDiagram, source: str, target: str) -> InfluenceDiagram:
    """Reverse the arc between two chance nodes, preserving their joint.

    Both nodes end up conditioned on the union of their old predecessors;
    the new tables follow from Bayes' rule. Where the reversed marginal row
    has probability zero the posterior is unreachable, so it is filled
    uniformly (any convention preserves the joint).
    """
    i = diagram.node(source)
    j = diagram.node(target)
    if not isinstance(i, ChanceNode) or not isinstance(j, ChanceNode):
        raise DomainError("NOT_CHANCE", f"'{source}' and '{target}' must both be chance nodes")
    if source not in j.predecessors:
        raise DomainError("REVERSAL_PATH", f"no arc '{source}' -> '{target}' exists")
    if _path_exists(diagram, source, target, skip_direct=True):
        raise DomainError(
            "REVERSAL_PATH",
            f"another directed path '{source}' -> '{target}' exists; reversal would create a cycle",
        )

    shared = _merge_predecessors(i.predecessors, j.predecessors, {source, target})
    new_j_table: dict[Row, tuple[float, ...]] = {}
    new_i_table: dict[Row, tuple[float, ...]] = {}
    uniform = 1.0 / len(i.outcomes)

    for key in row_keys(diagram, shared):
        assignment = dict(zip(shared, key))
        i_row = i.table[project(assignment, i.predecessors)]
        marginal = []
        for y_idx, y in enumerate(j.outcomes):
            total = 0.0
            for x_idx, x in enumerate(i.outcomes):
                assignment[source] = x
                j_row = j.table[project(assignment, j.predecessors)]
                total += clamp01(i_row[x_idx]) * clamp01(j_row[y_idx])
            marginal.append(total)
        del assignment[source]
        new_j_table[key] = tuple(marginal)

        for y_idx, y in enumerate(j.outcomes):
            posterior_key = key + (y,)
            if marginal[y_idx] == 0.0:
                new_i_table[posterior_key] = tuple(uniform for _ in i.outcomes)
                continue
            posterior = []
            for x_idx, x in enumerate(i.outcomes):
                assignment[source] = x
                j_row = j.table[project(assignment, j.predecessors)]
                posterior.append(clamp01(i_row[x_idx]) * clamp01(j_row[y_idx]) / marginal[y_idx])
            del assignment[source]
            new_i_table[posterior_key] = tuple(posterior)

    new_j = ChanceNode(j.variable, shared, new_j_table)
    new_i = ChanceNode(i.variable, shared + (target,), new_i_table)
    return diagram.replace_node(new_j).replace_node(new_i)


def _path_exists(diagram: InfluenceDiagram, source: str, target: str,
                 skip_direct: bool = False) -> bool:
    out: dict[str, list[str]] = {n.name: [] for n in diagram.nodes}
    for node in diagram.nodes:
        for pred in node.predecessors:
            if pred in out:
                if skip_direct and pred == source and node.name == target:
                    continue
                out[pred].append(node.name)
    stack, visited = list(out[source]), set(out[source])
    while stack:
        current = stack.pop()
        if current == target:
            return True
        for follower in out[current]:
            if follower not in visited:
                visited.add(follower)
                stack.append(follower)
    return False


def _barren_nodes(diagram: InfluenceDiagram) -> list[str]:
    return sorted(
        n.name
        for n in diagram.nodes
        if not isinstance(n, ValueNode) and not diagram.successors(n.name)
    )


def eliminate_barren(diagram: InfluenceDiagram) -> InfluenceDiagram:
    """Delete nodes with no successors until none remain (value node kept)."""
    result = diagram
    while True:
        barren = _barren_nodes(result)
        if not barren:
            return result
        for name in barren:
            result = result.without_node(name)


def eliminate_chance(diagram: InfluenceDiagram, name: str) -> InfluenceDiagram:
    """Absorb a chance node whose only successor is the value node.

    The value node's new table, over the union of both predecessor sets, is
    the expectation of the old utilities under the chance node's rows.
    """
    node = diagram.node(name)
    value = diagram.value_node()
    if not isinstance(node, ChanceNode):
        raise DomainError("NOT_REMOVABLE", f"'{name}' is not a chance node")
    if diagram.successors(name) != (value.name,):
        raise DomainError(
            "NOT_REMOVABLE",
            f"'{name}' has successors other than the value node: "
            f"{', '.join(s for s in diagram.successors(name) if s != value.name)}",
        )

    new_preds = _merge_predecessors(value.predecessors, node.predecessors, {name})
    new_utilities: dict[Row, float] = {}
    for key in row_keys(diagram, new_preds):
        assignment = dict(zip(new_preds, key))
        probabilities = node.table[project(assignment, node.predecessors)]
        expectation = 0.0
        for idx, outcome in enumerate(node.outcomes):
            p = clamp01(probabilities[idx])
            if p == 0.0:
                continue
            assignment[name] = outcome
            expectation += p * value.utilities[project(assignment, value.predecessors)]
        assignment.pop(name, None)
        new_utilities[key] = expectation

    new_value = ValueNode(value.name, new_preds, new_utilities)
    return diagram.without_node(name).replace_node(new_value)


def eliminate_decision(
    diagram: InfluenceDiagram, name: str
) -> tuple[InfluenceDiagram, dict[Row, int]]:
    """Remove a decision by maximizing utility per information state.

    Requires the value node to be the decision's only successor and every
    other direct value predecessor to be informationally available to the
    decision. Returns the shrunk diagram and the argmax table over the
    decision's full information states (ties go to the lowest index).
    """
    node = diagram.node(name)
    value = diagram.value_node()
    if not isinstance(node, DecisionNode):
        raise DomainError("NOT_REMOVABLE", f"'{name}' is not a decision node")
    if diagram.successors(name) != (value.name,):
        raise DomainError(
            "NOT_REMOVABLE", f"the value node is not the only successor of '{name}'"
        )
    known = set(node.predecessors)
    unknown = [p for p in value.predecessors if p != name and p not in known]
    if unknown:
        raise DomainError(
            "NOT_REMOVABLE",
            f"value predecessors {', '.join(unknown)} are not known to decision '{name}'",
        )

    new_preds = tuple(p for p in value.predecessors if p != name)
    new_utilities: dict[Row, float] = {}
    choice_by_state: dict[Row, int] = {}
    for key in row_keys(diagram, new_preds):
        assignment = dict(zip(new_preds, key))
        best_idx, best_u = 0, None
        for idx, alternative in enumerate(node.alternatives):
            assignment[name] = alternative
            u = value.utilities[project(assignment, value.predecessors)]
            if best_u is None or u > best_u:
                best_idx, best_u = idx, u
        del assignment[name]
        new_utilities[key] = best_u
        choice_by_state[key] = best_idx

    decision_table: dict[Row, int] = {}
    for info_state in row_keys(diagram, node.predecessors):
        assignment = dict(zip(node.predecessors, info_state))
        decision_table[info_state] = choice_by_state[project(assignment, new_preds)]

    new_value = ValueNode(value.name, new_preds, new_utilities)
    return diagram.without_node(name).replace_node(new_value), decision_table


def _reversal_candidates(diagram: InfluenceDiagram) -> list[str]:
    """Chance value-predecessors whose non-value successors are all chance.

    A chance node that informs a remaining decision cannot be freed by arc
    reversal, so it is not a candidate; it becomes removable only after that
    decision has been eliminated.
    """
    value = diagram.value_node()
    decision_names = {n.name for n in diagram.decision_nodes}
    candidates = []
    for name in value.predecessors:
        node = diagram.node(name)
        if not isinstance(node, ChanceNode):
            continue
        if any(s in decision_names for s in diagram.successors(name)):
            continue
        candidates.append(name)
    return candidates


def solve(diagram: InfluenceDiagram) -> SolveResult:
    """Optimal expected utility and policy for a valid, canonicalized diagram.

    The step budget only guards against solver bugs; every valid regular
    diagram terminates well within it.
    """
    work = diagram
    trace: list[Step] = []
    policy: Policy = {}
    remaining_decisions = decision_order(diagram)
    budget = 4 * max(1, len(diagram.nodes)) ** 2

    def spend() -> None:
        nonlocal budget
        budget -= 1
        if budget < 0:
            raise DomainError(
                "INTERNAL_NONTERMINATION",
                f"solver exceeded its step budget on diagram '{diagram.name}'",
            )

    while True:
        # (1) barren nodes: decisions removed here cannot affect value, so
        # any deterministic choice is optimal; index 0 is recorded.
        while True:
            barren = _barren_nodes(work)
            if not barren:
                break
            for name in barren:
                spend()
                node = work.node(name)
                if isinstance(node, DecisionNode):
                    policy[name] = {key: 0 for key in row_keys(work, node.predecessors)}
                    remaining_decisions.remove(name)
                work = work.without_node(name)
                trace.append(BarrenRemoval(name))

        if len(work.nodes) == 1:
            value = work.value_node()
            return SolveResult(value.utilities[()], policy, tuple(trace))

        value = work.value_node()

        # (2) chance node whose only successor is the value node
        absorbable = sorted(
            n.name
            for n in work.chance_nodes
            if work.successors(n.name) == (value.name,)
        )
        if absorbable:
            spend()
            work = eliminate_chance(work, absorbable[0])
            trace.append(ChanceRemoval(absorbable[0]))
            continue

        # (3) the temporally last remaining decision
        if remaining_decisions:
            last = remaining_decisions[-1]
            node = work.node(last)
            known = set(node.predecessors)
            if work.successors(last) == (value.name,) and all(
                p == last or p in known for p in value.predecessors
            ):
                spend()
                work, table = eliminate_decision(work, last)
                policy[last] = table
                remaining_decisions.pop()
                trace.append(DecisionRemoval(last))
                continue

        # (4) free a blocked chance value-predecessor by arc reversal
        candidates = _reversal_candidates(work)
        if not candidates:
            raise DomainError(
                "INTERNAL_NONTERMINATION",
                f"no elimination step applies to diagram '{diagram.name}'",
            )
        candidates.sort(key=lambda n: (len(work.successors(n)), n))
        chosen = candidates[0]
        while set(work.successors(chosen)) != {value.name}:
            spend()
            order = topological_order(work)
            position = {name: idx for idx, name in enumerate(order)}
            chance_successors = [
                s
                for s in work.successors(chosen)
                if isinstance(work.node(s), ChanceNode)
            ]
            target = min(chance_successors, key=lambda s: position[s])
            work = reverse_arc(work, chosen, target)
            trace.append(ArcReversal(chosen, target))
