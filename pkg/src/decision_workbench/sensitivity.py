"""Attention-focusing analyses over a solved diagram.

One-way parameter sweeps, decision thresholds, tornado ranking, and the
value of observing a chance variable before a decision. All operations are
pure: they re-solve perturbed copies and never touch the input diagram.

The scalar "which way would we act" indicator used by sweeps and threshold
scans is the optimal first-stage alternative: the alternative of the
temporally first decision with the highest forced expected utility, where
"forced" collapses that decision to a constant choice (one-row decision)
and leaves later decisions optimal. Ties go to the lowest alternative
index. For a first decision without informational predecessors this is
exactly the solver's recommendation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .diagram import (
    ChanceNode,
    DecisionNode,
    InfluenceDiagram,
    Row,
    canonicalize,
    decision_order,
    row_keys,
)
from .errors import DomainError
from .solver import SolveResult, solve


@dataclass(frozen=True)
class ParamRef:
    """A single numeric entry of a diagram.

    With ``outcome`` set it names one CPT probability: node, predecessor
    combination, outcome label. Without it, one utility entry of the value
    node: node, predecessor combination.
    """

    node: str
    row: Row
    outcome: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "row", tuple(self.row))

    @property
    def is_utility(self) -> bool:
        return self.outcome is None

    def label(self) -> str:
        key = "|".join(self.row)
        if self.is_utility:
            return f"{self.node}/{key}"
        return f"{self.node}/{key}/{self.outcome}"


def parse_param_label(label: str) -> ParamRef:
    """Parse 'NODE/ROW/OUTCOME' (CPT entry) or 'NODE/ROW' (utility entry);
    ROW is the '|'-joined predecessor combination, empty for no predecessors."""
    parts = label.split("/")
    if len(parts) == 3:
        node, row, outcome = parts
        return ParamRef(node, tuple(row.split("|")) if row else (), outcome)
    if len(parts) == 2:
        node, row = parts
        return ParamRef(node, tuple(row.split("|")) if row else ())
    raise DomainError("PARAM_NOT_FOUND", f"cannot parse parameter reference '{label}'")


@dataclass(frozen=True)
class SweepPoint:
    value: float
    alternative_eus: tuple[float, ...]
    optimal_eu: float
    optimal_index: int | None


@dataclass(frozen=True)
class SweepResult:
    param: ParamRef
    alternatives: tuple[str, ...]
    points: tuple[SweepPoint, ...]


@dataclass(frozen=True)
class TornadoEntry:
    param: ParamRef
    low: float
    high: float
    eu_low: float
    eu_high: float

    @property
    def swing(self) -> float:
        return abs(self.eu_high - self.eu_low)


def resolve_param(diagram: InfluenceDiagram, ref: ParamRef) -> float:
    """Current value of the referenced entry; PARAM_NOT_FOUND if it does not
    resolve to exactly one number."""
    try:
        node = diagram.node(ref.node)
    except KeyError:
        raise DomainError("PARAM_NOT_FOUND", f"no node named '{ref.node}'", node=ref.node)
    if isinstance(node, ChanceNode):
        if ref.is_utility:
            raise DomainError(
                "PARAM_NOT_FOUND",
                f"'{ref.node}' is a chance node; an outcome label is required",
                node=ref.node,
            )
        if ref.row not in node.table:
            raise DomainError(
                "PARAM_NOT_FOUND",
                f"node '{ref.node}' has no row {ref.label()!r}",
                node=ref.node,
                row="|".join(ref.row),
            )
        if ref.outcome not in node.outcomes:
            raise DomainError(
                "PARAM_NOT_FOUND",
                f"'{ref.outcome}' is not an outcome of '{ref.node}'",
                node=ref.node,
            )
        return node.table[ref.row][node.variable.index_of(ref.outcome)]
    if isinstance(node, DecisionNode):
        raise DomainError(
            "PARAM_NOT_FOUND",
            f"'{ref.node}' is a decision node and has no numeric parameters",
            node=ref.node,
        )
    if not ref.is_utility:
        raise DomainError(
            "PARAM_NOT_FOUND",
            f"'{ref.node}' is the value node; reference a utility entry without an outcome",
            node=ref.node,
        )
    if ref.row not in node.utilities:
        raise DomainError(
            "PARAM_NOT_FOUND",
            f"value node '{ref.node}' has no utility row {ref.label()!r}",
            node=ref.node,
            row="|".join(ref.row),
        )
    return node.utilities[ref.row]


def apply_param(diagram: InfluenceDiagram, ref: ParamRef, value: float) -> InfluenceDiagram:
    """Copy of the diagram with one entry set to ``value``.

    For a CPT entry the rest of the row is rescaled proportionally to keep
    the row normalized (uniformly, when the other entries sum to zero).
    Utilities are replaced as-is.
    """
    resolve_param(diagram, ref)
    node = diagram.node(ref.node)
    if isinstance(node, ChanceNode):
        if not 0.0 <= value <= 1.0:
            raise DomainError(
                "BAD_GRID", f"probability value {value!r} is outside [0, 1]", node=ref.node
            )
        idx = node.variable.index_of(ref.outcome)
        row = node.table[ref.row]
        rest = sum(p for k, p in enumerate(row) if k != idx)
        if len(row) == 1:
            if abs(value - 1.0) > 1e-9:
                raise DomainError(
                    "BAD_GRID",
                    "a single-outcome row cannot be renormalized away from 1",
                    node=ref.node,
                )
            new_row = (1.0,)
        elif rest > 0.0:
            scale = (1.0 - value) / rest
            new_row = tuple(
                value if k == idx else p * scale for k, p in enumerate(row)
            )
        else:
            fill = (1.0 - value) / (len(row) - 1)
            new_row = tuple(value if k == idx else fill for k in range(len(row)))
        table = dict(node.table)
        table[ref.row] = new_row
        return diagram.replace_node(ChanceNode(node.variable, node.predecessors, table))
    if not math.isfinite(value):
        raise DomainError("BAD_GRID", f"utility value {value!r} is not finite", node=ref.node)
    utilities = dict(node.utilities)
    utilities[ref.row] = float(value)
    return diagram.replace_node(replace(node, utilities=utilities))


def first_decision(diagram: InfluenceDiagram) -> DecisionNode | None:
    order = decision_order(diagram)
    return diagram.node(order[0]) if order else None


def first_information_state(diagram: InfluenceDiagram, decision: DecisionNode) -> Row:
    return row_keys(diagram, decision.predecessors)[0]


def first_stage_choice(diagram: InfluenceDiagram, result: SolveResult) -> int | None:
    """The solved policy's choice at the first decision's first information
    state -- the policy-change indicator reported by what-if analysis."""
    decision = first_decision(diagram)
    if decision is None:
        return None
    return result.policy[decision.name][first_information_state(diagram, decision)]


def force_first_alternative(diagram: InfluenceDiagram, index: int) -> InfluenceDiagram:
    """Collapse the first decision to a constant choice.

    The decision node becomes a degenerate chance node that picks the given
    alternative with probability one in every information state; later
    decisions stay free.
    """
    decision = first_decision(diagram)
    if decision is None:
        raise DomainError("PARAM_NOT_FOUND", "diagram has no decision node")
    one_hot = tuple(1.0 if k == index else 0.0 for k in range(len(decision.alternatives)))
    table = {key: one_hot for key in row_keys(diagram, decision.predecessors)}
    forced = ChanceNode(decision.variable, decision.predecessors, table)
    return diagram.replace_node(forced)


def forced_alternative_eus(diagram: InfluenceDiagram) -> tuple[float, ...]:
    """Expected utility per first-stage alternative, that alternative forced
    and every later decision optimal. Empty when there is no decision."""
    decision = first_decision(diagram)
    if decision is None:
        return ()
    return tuple(
        solve(force_first_alternative(diagram, k)).expected_utility
        for k in range(len(decision.alternatives))
    )


def _argmax_lowest(values: tuple[float, ...]) -> int:
    best = 0
    for k in range(1, len(values)):
        if values[k] > values[best]:
            best = k
    return best


def _sweep_point(diagram: InfluenceDiagram, value: float) -> SweepPoint:
    eus = forced_alternative_eus(diagram)
    if not eus:
        return SweepPoint(value, (), solve(diagram).expected_utility, None)
    best = _argmax_lowest(eus)
    return SweepPoint(value, eus, eus[best], best)


def sweep(diagram: InfluenceDiagram, ref: ParamRef, grid: list[float]) -> SweepResult:
    """Re-solve across a grid of values for one parameter.

    Each point records the forced expected utility of every first-stage
    alternative, their maximum, and the argmax (ties to the lowest index).
    """
    diagram = canonicalize(diagram)
    resolve_param(diagram, ref)
    if not ref.is_utility:
        for v in grid:
            if not 0.0 <= v <= 1.0:
                raise DomainError(
                    "BAD_GRID", f"grid value {v!r} is outside [0, 1]", node=ref.node
                )
    decision = first_decision(diagram)
    alternatives = decision.alternatives if decision is not None else ()
    points = tuple(_sweep_point(apply_param(diagram, ref, v), v) for v in grid)
    return SweepResult(ref, alternatives, points)


THRESHOLD_SCAN_POINTS = 101
THRESHOLD_PRECISION = 1e-6


def thresholds(
    diagram: InfluenceDiagram,
    ref: ParamRef,
    scan_points: int = THRESHOLD_SCAN_POINTS,
    precision: float = THRESHOLD_PRECISION,
) -> list[float]:
    """Parameter values in (0, 1) where the optimal first-stage alternative
    changes.

    Scans a uniform grid over [0, 1] and bisects every adjacent pair whose
    indicator differs down to ``precision``. Expected utility is piecewise
    linear in a single CPT entry, so crossings inside a grid cell are
    isolated; a cell containing several crossings reports one.
    """
    if ref.is_utility:
        raise DomainError(
            "PARAM_NOT_FOUND", "threshold search applies to probability entries only"
        )
    diagram = canonicalize(diagram)
    resolve_param(diagram, ref)

    def indicator(v: float) -> int | None:
        return _sweep_point(apply_param(diagram, ref, v), v).optimal_index

    grid = [k / (scan_points - 1) for k in range(scan_points)]
    marks = [indicator(v) for v in grid]
    found: list[float] = []
    for (lo, lo_mark), (hi, hi_mark) in zip(zip(grid, marks), zip(grid[1:], marks[1:])):
        if lo_mark == hi_mark:
            continue
        while hi - lo > precision:
            mid = (lo + hi) / 2.0
            if indicator(mid) == lo_mark:
                lo = mid
            else:
                hi = mid
        crossing = (lo + hi) / 2.0
        if 0.0 < crossing < 1.0:
            found.append(crossing)
    return found


def tornado(
    diagram: InfluenceDiagram, params: list[tuple[ParamRef, float, float]]
) -> list[TornadoEntry]:
    """Optimal expected utility at each parameter's low and high value,
    ranked by swing (descending; ties by node name then label)."""
    diagram = canonicalize(diagram)
    entries = []
    for ref, low, high in params:
        eu_low = solve(apply_param(diagram, ref, low)).expected_utility
        eu_high = solve(apply_param(diagram, ref, high)).expected_utility
        entries.append(TornadoEntry(ref, low, high, eu_low, eu_high))
    entries.sort(key=lambda e: (-e.swing, e.param.node, e.param.label()))
    return entries


def all_probability_params(
    diagram: InfluenceDiagram, delta: float = 0.1
) -> list[tuple[ParamRef, float, float]]:
    """Every CPT entry with a +-``delta`` range clamped into [0, 1]."""
    params = []
    for node in diagram.chance_nodes:
        for key in row_keys(diagram, node.predecessors):
            row = node.table[key]
            for idx, outcome in enumerate(node.outcomes):
                ref = ParamRef(node.name, key, outcome)
                low = max(0.0, row[idx] - delta)
                high = min(1.0, row[idx] + delta)
                params.append((ref, low, high))
    return params


def evpi(diagram: InfluenceDiagram, chance: str, decision: str) -> float:
    """Expected utility gained by observing ``chance`` before ``decision``.

    Computed by adding the information arc, re-canonicalizing, and
    re-solving; observing a variable can never hurt, so the result is
    nonnegative up to solver tolerance.
    """
    try:
        c_node = diagram.node(chance)
        d_node = diagram.node(decision)
    except KeyError as exc:
        raise DomainError("PARAM_NOT_FOUND", str(exc)) from None
    if not isinstance(c_node, ChanceNode):
        raise DomainError("PARAM_NOT_FOUND", f"'{chance}' is not a chance node")
    if not isinstance(d_node, DecisionNode):
        raise DomainError("PARAM_NOT_FOUND", f"'{decision}' is not a decision node")
    if _is_descendant(diagram, of=decision, name=chance):
        raise DomainError(
            "WOULD_CYCLE",
            f"'{chance}' is downstream of '{decision}'; observing it first is impossible",
        )
    baseline = solve(canonicalize(diagram)).expected_utility
    if chance in d_node.predecessors:
        return 0.0
    informed = diagram.replace_node(
        replace(d_node, predecessors=d_node.predecessors + (chance,))
    )
    return solve(canonicalize(informed)).expected_utility - baseline


def _is_descendant(diagram: InfluenceDiagram, of: str, name: str) -> bool:
    out: dict[str, list[str]] = {n.name: [] for n in diagram.nodes}
    for node in diagram.nodes:
        for pred in node.predecessors:
            if pred in out:
                out[pred].append(node.name)
    stack, visited = [of], {of}
    while stack:
        for follower in out[stack.pop()]:
            if follower == name:
                return True
            if follower not in visited:
                visited.add(follower)
                stack.append(follower)
    return False
