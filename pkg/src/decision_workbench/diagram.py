"""Influence-diagram data model, structural validation, and canonical form.

An influence diagram is an acyclic directed graph over three node kinds:
chance nodes (discrete variables with a conditional probability table over
their predecessors' outcomes), decision nodes (a choice among alternatives,
whose incoming arcs mean "known when the decision is made"), and exactly one
value node (a utility table over its predecessors' outcomes). Arcs are not
stored explicitly; they are derived from each node's predecessor list.

Conventions used throughout the package:

* A table row is keyed by the tuple of predecessor outcomes, in declared
  predecessor order. A node with no predecessors has the single row ``()``.
* Rows are enumerated in Cartesian-product order of the predecessors'
  declared outcome lists ("canonical row order").
* All tie-breaks are lexicographic by node name, so every operation is
  deterministic across runs.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field, replace

from .errors import DomainError

ROW_SUM_TOLERANCE = 1e-9
ENTRY_SLACK = 1e-12

Row = tuple[str, ...]


def clamp01(p: float) -> float:
    """Clamp a probability entry into [0, 1] (round-off slack is validated)."""
    return 0.0 if p < 0.0 else 1.0 if p > 1.0 else p


def _checked_predecessors(owner: str, predecessors: tuple[str, ...]) -> tuple[str, ...]:
    predecessors = tuple(predecessors)
    if len(set(predecessors)) != len(predecessors):
        raise ValueError(f"predecessor list of '{owner}' contains duplicates")
    return predecessors


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered, non-empty outcome list."""

    name: str
    outcomes: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be non-empty")
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if not self.outcomes:
            raise ValueError(f"variable '{self.name}' must have at least one outcome")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise ValueError(f"variable '{self.name}' has duplicate outcome labels")
        for label in self.outcomes:
            if not label:
                raise ValueError(f"variable '{self.name}' has an empty outcome label")
            if "|" in label:
                # '|' is reserved as the row-key separator in serialized documents.
                raise ValueError(f"outcome label '{label}' may not contain '|'")

    def index_of(self, outcome: str) -> int:
        try:
            return self.outcomes.index(outcome)
        except ValueError:
            raise KeyError(f"'{outcome}' is not an outcome of '{self.name}'") from None


@dataclass(frozen=True)
class ChanceNode:
    """An uncertain variable quantified by a conditional probability table.

    ``table`` maps each combination of predecessor outcomes (a ``Row``) to
    the probability of each of the variable's outcomes, in declared order.
    """

    variable: Variable
    predecessors: tuple[str, ...] = ()
    table: dict[Row, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "predecessors", _checked_predecessors(self.name, self.predecessors)
        )
        object.__setattr__(
            self,
            "table",
            {tuple(k): tuple(float(p) for p in v) for k, v in self.table.items()},
        )

    @property
    def name(self) -> str:
        return self.variable.name

    @property
    def outcomes(self) -> tuple[str, ...]:
        return self.variable.outcomes


@dataclass(frozen=True)
class DecisionNode:
    """A choice among the variable's outcomes (the alternatives).

    Predecessors are informational: their values are known when the
    decision is made.
    """

    variable: Variable
    predecessors: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "predecessors", _checked_predecessors(self.name, self.predecessors)
        )

    @property
    def name(self) -> str:
        return self.variable.name

    @property
    def alternatives(self) -> tuple[str, ...]:
        return self.variable.outcomes


@dataclass(frozen=True)
class ValueNode:
    """The decision maker's preferences: a utility per predecessor combination."""

    name: str
    predecessors: tuple[str, ...] = ()
    utilities: dict[Row, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("value node name must be non-empty")
        object.__setattr__(
            self, "predecessors", _checked_predecessors(self.name, self.predecessors)
        )
        object.__setattr__(
            self,
            "utilities",
            {tuple(k): float(u) for k, u in self.utilities.items()},
        )


Node = ChanceNode | DecisionNode | ValueNode


@dataclass(frozen=True)
class InfluenceDiagram:
    """A named collection of nodes; arcs derive from predecessor lists.

    Diagrams are immutable values: every operation in this package returns
    a new diagram and leaves its input untouched. Nodes form a set, so they
    are stored sorted by name and two diagrams compare equal regardless of
    the order they were assembled in.
    """

    name: str
    nodes: tuple[Node, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.name)))

    def node_names(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes)

    def has_node(self, name: str) -> bool:
        return any(n.name == name for n in self.nodes)

    def node(self, name: str) -> Node:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(f"no node named '{name}'")

    @property
    def chance_nodes(self) -> tuple[ChanceNode, ...]:
        return tuple(n for n in self.nodes if isinstance(n, ChanceNode))

    @property
    def decision_nodes(self) -> tuple[DecisionNode, ...]:
        return tuple(n for n in self.nodes if isinstance(n, DecisionNode))

    @property
    def value_nodes(self) -> tuple[ValueNode, ...]:
        return tuple(n for n in self.nodes if isinstance(n, ValueNode))

    def value_node(self) -> ValueNode:
        values = self.value_nodes
        if len(values) != 1:
            raise DomainError(
                "NO_VALUE_NODE" if not values else "MULTIPLE_VALUE_NODES",
                f"diagram '{self.name}' has {len(values)} value nodes",
            )
        return values[0]

    def successors(self, name: str) -> tuple[str, ...]:
        return tuple(
            sorted(n.name for n in self.nodes if name in n.predecessors)
        )

    def outcomes_of(self, name: str) -> tuple[str, ...]:
        node = self.node(name)
        if isinstance(node, ChanceNode):
            return node.outcomes
        if isinstance(node, DecisionNode):
            return node.alternatives
        raise KeyError(f"value node '{name}' has no outcomes")

    def replace_node(self, node: Node) -> InfluenceDiagram:
        return replace(
            self,
            nodes=tuple(node if n.name == node.name else n for n in self.nodes),
        )

    def without_node(self, name: str) -> InfluenceDiagram:
        return replace(self, nodes=tuple(n for n in self.nodes if n.name != name))

    def with_node(self, node: Node) -> InfluenceDiagram:
        return replace(self, nodes=self.nodes + (node,))


def row_keys(diagram: InfluenceDiagram, predecessors: tuple[str, ...]) -> list[Row]:
    """All predecessor outcome combinations, in canonical row order."""
    domains = [diagram.outcomes_of(p) for p in predecessors]
    return [tuple(combo) for combo in itertools.product(*domains)]


def project(assignment: dict[str, str], predecessors: tuple[str, ...]) -> Row:
    """Extract the row key for ``predecessors`` from a full assignment."""
    return tuple(assignment[p] for p in predecessors)


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def _first_by_name(diagram: InfluenceDiagram) -> dict[str, Node]:
    by_name: dict[str, Node] = {}
    for node in diagram.nodes:
        by_name.setdefault(node.name, node)
    return by_name


def _detect_cycle(by_name: dict[str, Node]) -> list[str]:
    """Names of nodes on or downstream of a cycle ([] if acyclic)."""
    indegree = {name: 0 for name in by_name}
    out: dict[str, list[str]] = {name: [] for name in by_name}
    for name, node in by_name.items():
        for pred in node.predecessors:
            if pred in by_name:
                indegree[name] += 1
                out[pred].append(name)
    ready = [name for name, deg in indegree.items() if deg == 0]
    seen = 0
    while ready:
        current = ready.pop()
        seen += 1
        for follower in out[current]:
            indegree[follower] -= 1
            if indegree[follower] == 0:
                ready.append(follower)
    if seen == len(by_name):
        return []
    return sorted(name for name, deg in indegree.items() if deg > 0)


def _reaches(by_name: dict[str, Node], source: str, target: str) -> bool:
    """True if a directed path source -> ... -> target exists."""
    out: dict[str, list[str]] = {name: [] for name in by_name}
    for name, node in by_name.items():
        for pred in node.predecessors:
            if pred in out:
                out[pred].append(name)
    stack, visited = [source], {source}
    while stack:
        current = stack.pop()
        if current == target:
            return True
        for follower in out[current]:
            if follower not in visited:
                visited.add(follower)
                stack.append(follower)
    return False


def _check_chance_table(diagram, node: ChanceNode, add) -> None:
    expected = set(row_keys(diagram, node.predecessors))
    for key in sorted(expected - set(node.table)):
        add("MISSING_ROW", node.name, f"missing row for predecessor combination {key!r}")
    for key in sorted(set(node.table) - expected):
        add("MISSING_ROW", node.name, f"row {key!r} matches no predecessor combination")
    for key in sorted(expected & set(node.table)):
        row = node.table[key]
        if len(row) != len(node.outcomes):
            add(
                "BAD_PROBABILITY",
                node.name,
                f"row {key!r} has {len(row)} entries for {len(node.outcomes)} outcomes",
            )
            continue
        bad = False
        for p in row:
            if not math.isfinite(p) or p < -ENTRY_SLACK or p > 1.0 + ENTRY_SLACK:
                add("BAD_PROBABILITY", node.name, f"entry {p!r} in row {key!r} is outside [0, 1]")
                bad = True
        if not bad and abs(sum(row) - 1.0) > ROW_SUM_TOLERANCE:
            add(
                "ROW_NOT_NORMALIZED",
                node.name,
                f"row {key!r} sums to {sum(row)!r}",
            )


def _check_value_table(diagram, node: ValueNode, add) -> None:
    expected = set(row_keys(diagram, node.predecessors))
    for key in sorted(expected - set(node.utilities)):
        add("MISSING_ROW", node.name, f"missing utility for predecessor combination {key!r}")
    for key in sorted(set(node.utilities) - expected):
        add("MISSING_ROW", node.name, f"utility row {key!r} matches no predecessor combination")
    for key in sorted(expected & set(node.utilities)):
        if not math.isfinite(node.utilities[key]):
            add("BAD_PROBABILITY", node.name, f"utility for {key!r} is not a finite number")


def validate(diagram: InfluenceDiagram, structural_only: bool = False) -> ValidationReport:
    """Check every diagram invariant and report all violations.

    Problems are reported, never raised; an empty report means the diagram
    is fully valid. ``structural_only`` skips the quantitative table checks,
    which is what schema skeletons with unbound regions need.

    Violations are ordered by (code, node-or-arc, message) so reports are
    byte-stable for identical inputs.
    """
    found: list[Violation] = []

    def add(code: str, where: str, message: str) -> None:
        found.append(Violation(code, where, message))

    names = [n.name for n in diagram.nodes]
    for name in sorted({n for n in names if names.count(n) > 1}):
        add("DUPLICATE_NAME", name, f"{names.count(name)} nodes share the name '{name}'")

    by_name = _first_by_name(diagram)
    value_names = {n.name for n in diagram.value_nodes}

    for node in diagram.nodes:
        for pred in node.predecessors:
            if pred == node.name:
                add("CYCLE", node.name, f"node '{node.name}' precedes itself")
            elif pred not in by_name:
                add(
                    "DANGLING_PREDECESSOR",
                    f"{pred}->{node.name}",
                    f"predecessor '{pred}' of '{node.name}' does not exist",
                )
            elif pred in value_names:
                add(
                    "VALUE_HAS_SUCCESSOR",
                    f"{pred}->{node.name}",
                    f"value node '{pred}' may not precede '{node.name}'",
                )

    cyclic = _detect_cycle(by_name)
    if cyclic:
        add("CYCLE", cyclic[0], f"cycle through nodes {', '.join(cyclic)}")

    values = diagram.value_nodes
    if not values:
        add("NO_VALUE_NODE", diagram.name, "diagram has no value node")
    elif len(values) > 1:
        add(
            "MULTIPLE_VALUE_NODES",
            diagram.name,
            f"diagram has {len(values)} value nodes: {', '.join(sorted(v.name for v in values))}",
        )

    decisions = [n.name for n in diagram.decision_nodes]
    if len(decisions) > 1 and not cyclic:
        ordered = [n for n in topological_order(diagram) if n in set(decisions)]
        for earlier, later in zip(ordered, ordered[1:]):
            if not _reaches(by_name, earlier, later):
                add(
                    "DECISIONS_UNORDERED",
                    f"{earlier}->{later}",
                    f"no directed path orders decisions '{earlier}' and '{later}'",
                )

    if not structural_only:
        for node in diagram.nodes:
            if any(p not in by_name or p in value_names for p in node.predecessors):
                continue  # row enumeration undefined; the arc problem is already reported
            if isinstance(node, ChanceNode):
                _check_chance_table(diagram, node, add)
            elif isinstance(node, ValueNode):
                _check_value_table(diagram, node, add)

    ordered_violations = tuple(sorted(found, key=lambda v: (v.code, v.where, v.message)))
    return ValidationReport(ordered_violations)


def topological_order(diagram: InfluenceDiagram) -> list[str]:
    """Deterministic topological order: ties broken lexicographically by name."""
    by_name = _first_by_name(diagram)
    indegree = {name: 0 for name in by_name}
    out: dict[str, list[str]] = {name: [] for name in by_name}
    for name, node in by_name.items():
        for pred in node.predecessors:
            if pred == name:
                raise DomainError("CYCLE", f"node '{name}' precedes itself")
            if pred in by_name:
                indegree[name] += 1
                out[pred].append(name)
    ready = [name for name, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        current = heapq.heappop(ready)
        order.append(current)
        for follower in out[current]:
            indegree[follower] -= 1
            if indegree[follower] == 0:
                heapq.heappush(ready, follower)
    if len(order) != len(by_name):
        raise DomainError("CYCLE", f"diagram '{diagram.name}' contains a cycle")
    return order


def decision_order(diagram: InfluenceDiagram) -> list[str]:
    """Decision names in temporal order; raises if no total order exists."""
    decisions = {n.name for n in diagram.decision_nodes}
    ordered = [name for name in topological_order(diagram) if name in decisions]
    by_name = _first_by_name(diagram)
    for earlier, later in zip(ordered, ordered[1:]):
        if not _reaches(by_name, earlier, later):
            raise DomainError(
                "DECISIONS_UNORDERED",
                f"no directed path orders decisions '{earlier}' and '{later}'",
            )
    return ordered


def canonicalize(diagram: InfluenceDiagram) -> InfluenceDiagram:
    """Add no-forgetting arcs: each decision knows every earlier decision and
    everything those decisions knew.

    Working through the decisions in temporal order, any name already known
    at an earlier decision but absent from the current decision's predecessor
    list is appended (in sorted order, so the result is deterministic and the
    operation idempotent). Chance nodes, tables, and utilities are untouched.
    """
    ordered = decision_order(diagram)
    result = diagram
    known: set[str] = set()
    for name in ordered:
        node = result.node(name)
        missing = sorted(known - set(node.predecessors) - {name})
        if missing:
            node = replace(node, predecessors=node.predecessors + tuple(missing))
            result = result.replace_node(node)
        known.add(name)
        known.update(node.predecessors)
    return result
