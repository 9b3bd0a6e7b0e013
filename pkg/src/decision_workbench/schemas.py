"""Decision knowledge as a library of partially assessed diagram fragments.

A schema fragment is a structurally complete influence diagram whose
quantitative regions (CPT rows, whole CPTs, utility entries or tables) are
left unbound and exposed as named slots with assessment prompts. Fragments
carry an applicability predicate -- a conjunction of boolean feature
literals -- and a priority; consultation picks the first applicable
fragment in priority order and instantiates it with user bindings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .diagram import (
    ChanceNode,
    InfluenceDiagram,
    ROW_SUM_TOLERANCE,
    Row,
    ValueNode,
    row_keys,
    validate,
)
from .errors import DomainError

SLOT_KINDS = ("cpt_row", "cpt", "utility_row", "utility_table")

FeatureVector = dict[str, bool]


@dataclass(frozen=True)
class Slot:
    """One unassessed region of a fragment and the question that fills it."""

    id: str
    kind: str  # one of SLOT_KINDS
    node: str
    row: Row | None = None  # for *_row kinds
    prompt: str = ""

    def __post_init__(self) -> None:
        if self.kind not in SLOT_KINDS:
            raise ValueError(f"unknown slot kind '{self.kind}'")
        if self.row is not None:
            object.__setattr__(self, "row", tuple(self.row))


@dataclass(frozen=True)
class SchemaFragment:
    id: str
    priority: int
    applicability: dict[str, bool]
    diagram: InfluenceDiagram
    slots: tuple[Slot, ...]
    description: str = ""

    def matches(self, features: FeatureVector) -> bool:
        return all(
            features.get(name, False) == required
            for name, required in self.applicability.items()
        )


@dataclass(frozen=True)
class SchemaLibrary:
    features: tuple[str, ...]
    fragments: tuple[SchemaFragment, ...]  # sorted by (priority, id)

    def fragment(self, schema_id: str) -> SchemaFragment:
        for fragment in self.fragments:
            if fragment.id == schema_id:
                return fragment
        raise DomainError("NO_APPLICABLE_SCHEMA", f"no schema with id '{schema_id}'")


def check_features(features: FeatureVector, library: SchemaLibrary) -> None:
    declared = set(library.features)
    unknown = sorted(set(features) - declared)
    if unknown:
        raise DomainError(
            "UNKNOWN_FEATURE",
            f"features {', '.join(unknown)} are not declared by the library",
        )


def select_schema(features: FeatureVector, library: SchemaLibrary) -> SchemaFragment:
    """First fragment, in priority order, whose applicability conjunction is
    satisfied (absent features count as false)."""
    check_features(features, library)
    for fragment in library.fragments:
        if fragment.matches(features):
            return fragment
    raise DomainError(
        "NO_APPLICABLE_SCHEMA", "no schema in the library matches the given features"
    )


def _slot_rows(diagram: InfluenceDiagram, slot: Slot) -> set[Row]:
    node = diagram.node(slot.node)
    preds = node.predecessors
    if slot.kind in ("cpt_row", "utility_row"):
        return {slot.row}
    return set(row_keys(diagram, preds))


def check_fragment(fragment: SchemaFragment) -> None:
    """Enforce fragment invariants at load time.

    The skeleton must pass every structural validation, its unassessed rows
    must be exactly the union of the slot targets, and slots must not
    overlap -- together these guarantee that binding every slot yields a
    fully valid diagram.
    """
    report = validate(fragment.diagram, structural_only=True)
    if not report.ok:
        first = report.violations[0]
        raise DomainError(
            "INVALID_SCHEMA",
            f"schema '{fragment.id}' skeleton is structurally invalid: "
            f"{first.code} at {first.where}: {first.message}",
        )
    ids = [slot.id for slot in fragment.slots]
    if len(set(ids)) != len(ids):
        raise DomainError("INVALID_SCHEMA", f"schema '{fragment.id}' has duplicate slot ids")

    claimed: dict[tuple[str, Row], str] = {}
    for slot in fragment.slots:
        try:
            node = fragment.diagram.node(slot.node)
        except KeyError:
            raise DomainError(
                "INVALID_SCHEMA",
                f"slot '{slot.id}' targets unknown node '{slot.node}'",
            ) from None
        if slot.kind in ("cpt_row", "cpt") and not isinstance(node, ChanceNode):
            raise DomainError(
                "INVALID_SCHEMA", f"slot '{slot.id}' targets a non-chance node"
            )
        if slot.kind in ("utility_row", "utility_table") and not isinstance(node, ValueNode):
            raise DomainError(
                "INVALID_SCHEMA", f"slot '{slot.id}' targets a non-value node"
            )
        if slot.kind in ("cpt_row", "utility_row") and slot.row is None:
            raise DomainError(
                "INVALID_SCHEMA", f"slot '{slot.id}' needs a row key"
            )
        for row in _slot_rows(fragment.diagram, slot):
            key = (slot.node, row)
            if key in claimed:
                raise DomainError(
                    "INVALID_SCHEMA",
                    f"slots '{claimed[key]}' and '{slot.id}' both target "
                    f"{slot.node} row {row!r}",
                )
            claimed[key] = slot.id

    unassessed: set[tuple[str, Row]] = set()
    for node in fragment.diagram.nodes:
        if isinstance(node, ChanceNode):
            present = set(node.table)
        elif isinstance(node, ValueNode):
            present = set(node.utilities)
        else:
            continue
        for row in row_keys(fragment.diagram, node.predecessors):
            if row not in present:
                unassessed.add((node.name, row))
    if unassessed != set(claimed):
        missing = sorted(unassessed - set(claimed))
        extra = sorted(set(claimed) - unassessed)
        raise DomainError(
            "INVALID_SCHEMA",
            f"schema '{fragment.id}' slots do not cover its unassessed regions "
            f"(uncovered: {missing}, already assessed: {extra})",
        )


def _parse_row_key(key: str) -> Row:
    return tuple(key.split("|")) if key else ()


def _checked_probability_row(slot: Slot, values: object, width: int) -> tuple[float, ...]:
    if not isinstance(values, (list, tuple)) or len(values) != width:
        raise DomainError(
            "INVALID_ROW",
            f"slot '{slot.id}' expects a probability row of {width} entries",
            slot=slot.id,
        )
    try:
        row = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise DomainError(
            "INVALID_ROW", f"slot '{slot.id}' row contains non-numeric entries", slot=slot.id
        ) from None
    if any(p < -1e-12 or p > 1.0 + 1e-12 for p in row):
        raise DomainError(
            "INVALID_ROW", f"slot '{slot.id}' row has entries outside [0, 1]", slot=slot.id
        )
    if abs(sum(row) - 1.0) > ROW_SUM_TOLERANCE:
        raise DomainError(
            "INVALID_ROW",
            f"slot '{slot.id}' row sums to {sum(row)!r}, not 1",
            slot=slot.id,
        )
    return row


def _checked_utility(slot: Slot, value: object) -> float:
    try:
        number = float(value)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise DomainError(
            "INVALID_ROW", f"slot '{slot.id}' expects a number", slot=slot.id
        ) from None
    if not math.isfinite(number):
        raise DomainError(
            "INVALID_ROW", f"slot '{slot.id}' utility must be finite", slot=slot.id
        )
    return number


def _row_mapping(slot: Slot, value: object, expected: list[Row]) -> dict[Row, object]:
    if not isinstance(value, dict):
        raise DomainError(
            "INVALID_ROW",
            f"slot '{slot.id}' expects a mapping from row key to values",
            slot=slot.id,
        )
    provided = {_parse_row_key(str(k)): v for k, v in value.items()}
    missing = [r for r in expected if r not in provided]
    extra = [r for r in provided if r not in expected]
    if missing or extra:
        raise DomainError(
            "INVALID_ROW",
            f"slot '{slot.id}' rows do not match the node's predecessor "
            f"combinations (missing {missing}, unexpected {extra})",
            slot=slot.id,
        )
    return provided


def instantiate(fragment: SchemaFragment, bindings: dict[str, object]) -> InfluenceDiagram:
    """Fill every slot of a fragment and return the fully assessed diagram.

    Binding values use the interchange shapes: a probability row is a list
    of numbers in outcome order; whole-table slots take a mapping from
    row-key strings ("o1|o2|...") to rows or numbers.
    """
    slot_ids = {slot.id for slot in fragment.slots}
    missing = sorted(slot_ids - set(bindings))
    if missing:
        raise DomainError(
            "MISSING_SLOT", f"bindings missing for slots: {', '.join(missing)}"
        )
    unknown = sorted(set(bindings) - slot_ids)
    if unknown:
        raise DomainError("UNKNOWN_SLOT", f"unknown slot ids: {', '.join(unknown)}")

    result = fragment.diagram
    for slot in fragment.slots:
        value = bindings[slot.id]
        node = result.node(slot.node)
        if slot.kind == "cpt_row":
            row = _checked_probability_row(slot, value, len(node.outcomes))
            table = dict(node.table)
            table[slot.row] = row
            result = result.replace_node(ChanceNode(node.variable, node.predecessors, table))
        elif slot.kind == "cpt":
            expected = row_keys(result, node.predecessors)
            provided = _row_mapping(slot, value, expected)
            table = dict(node.table)
            for key in expected:
                table[key] = _checked_probability_row(slot, provided[key], len(node.outcomes))
            result = result.replace_node(ChanceNode(node.variable, node.predecessors, table))
        elif slot.kind == "utility_row":
            utilities = dict(node.utilities)
            utilities[slot.row] = _checked_utility(slot, value)
            result = result.replace_node(ValueNode(node.name, node.predecessors, utilities))
        else:  # utility_table
            expected = row_keys(result, node.predecessors)
            provided = _row_mapping(slot, value, expected)
            utilities = dict(node.utilities)
            for key in expected:
                utilities[key] = _checked_utility(slot, provided[key])
            result = result.replace_node(ValueNode(node.name, node.predecessors, utilities))

    report = validate(result)
    if not report.ok:
        first = report.violations[0]
        raise DomainError(
            first.code, f"instantiated diagram is invalid at {first.where}: {first.message}"
        )
    return result
