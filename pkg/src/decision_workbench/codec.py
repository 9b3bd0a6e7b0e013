"""Canonical interchange format (JSON documents, format version 1).

A diagram document lists variables sorted by name and nodes in topological
order; CPT and utility rows are keyed by the '|'-joined predecessor
combination and written in Cartesian-product order. Encoding the same
diagram therefore always produces byte-identical text, and probabilities
round-trip exactly (shortest-repr decimal literals).

Unknown fields are rejected so that documents written by a future format
version fail loudly instead of being half-read.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .consultation import Session, SessionEvent
from .diagram import (
    ChanceNode,
    DecisionNode,
    InfluenceDiagram,
    Row,
    ValueNode,
    Variable,
    row_keys,
    topological_order,
    validate,
)
from .errors import DomainError
from .schemas import SchemaFragment, SchemaLibrary, Slot, check_fragment
from .sensitivity import ParamRef, first_decision, first_stage_choice

FORMAT_VERSION = 1


def row_key_to_str(row: Row) -> str:
    return "|".join(row)


def str_to_row_key(key: str) -> Row:
    return tuple(key.split("|")) if key else ()


class DiagramValidationError(DomainError):
    """Raised by decode when a parsed diagram fails validation."""

    def __init__(self, report, diagram: InfluenceDiagram) -> None:
        first = report.violations[0]
        super().__init__(first.code, f"{first.where}: {first.message}", where=first.where)
        self.report = report
        self.diagram = diagram


def _require_fields(obj: dict, required: dict[str, str], optional: dict[str, str],
                    what: str) -> None:
    for name in required:
        if name not in obj:
            raise DomainError("PARSE_ERROR", f"{what} is missing field '{name}'")
    for name in obj:
        if name not in required and name not in optional:
            raise DomainError(
                "PARSE_ERROR",
                f"{what} has unknown field '{name}' (format version {FORMAT_VERSION})",
            )


def _check_version(obj: dict, what: str) -> None:
    if "version" not in obj:
        raise DomainError("PARSE_ERROR", f"{what} is missing field 'version'")
    if obj["version"] != FORMAT_VERSION:
        raise DomainError(
            "UNSUPPORTED_VERSION",
            f"{what} has version {obj['version']!r}; this build reads version {FORMAT_VERSION}",
        )


def diagram_to_document(diagram: InfluenceDiagram) -> dict:
    """Canonical dict form of a diagram (requires a valid diagram, since the
    node ordering is topological)."""
    variables = sorted(
        (n.variable for n in diagram.nodes if not isinstance(n, ValueNode)),
        key=lambda v: v.name,
    )
    nodes = []
    for name in topological_order(diagram):
        node = diagram.node(name)
        if isinstance(node, ChanceNode):
            nodes.append(
                {
                    "name": node.name,
                    "kind": "chance",
                    "predecessors": list(node.predecessors),
                    "cpt": {
                        row_key_to_str(key): list(node.table[key])
                        for key in row_keys(diagram, node.predecessors)
                        if key in node.table
                    },
                }
            )
        elif isinstance(node, DecisionNode):
            nodes.append(
                {
                    "name": node.name,
                    "kind": "decision",
                    "predecessors": list(node.predecessors),
                }
            )
        else:
            nodes.append(
                {
                    "name": node.name,
                    "kind": "value",
                    "predecessors": list(node.predecessors),
                    "utilities": {
                        row_key_to_str(key): node.utilities[key]
                        for key in row_keys(diagram, node.predecessors)
                        if key in node.utilities
                    },
                }
            )
    return {
        "version": FORMAT_VERSION,
        "name": diagram.name,
        "variables": [
            {"name": v.name, "outcomes": list(v.outcomes)} for v in variables
        ],
        "nodes": nodes,
    }


def document_to_diagram(document: Any) -> InfluenceDiagram:
    """Parse a diagram document without validating it; tables may be left
    partially assessed (schema skeletons). Structural problems in the text
    itself raise PARSE_ERROR."""
    if not isinstance(document, dict):
        raise DomainError("PARSE_ERROR", "diagram document must be a JSON object")
    _check_version(document, "diagram document")
    _require_fields(
        document,
        {"version": "", "name": "", "variables": "", "nodes": ""},
        {},
        "diagram document",
    )
    variables: dict[str, Variable] = {}
    if not isinstance(document["variables"], list):
        raise DomainError("PARSE_ERROR", "'variables' must be a list")
    for entry in document["variables"]:
        if not isinstance(entry, dict):
            raise DomainError("PARSE_ERROR", "variable entries must be objects")
        _require_fields(entry, {"name": "", "outcomes": ""}, {}, "variable")
        try:
            variable = Variable(str(entry["name"]), tuple(str(o) for o in entry["outcomes"]))
        except (ValueError, TypeError) as exc:
            raise DomainError("PARSE_ERROR", f"bad variable: {exc}") from None
        if variable.name in variables:
            raise DomainError("PARSE_ERROR", f"variable '{variable.name}' defined twice")
        variables[variable.name] = variable

    if not isinstance(document["nodes"], list):
        raise DomainError("PARSE_ERROR", "'nodes' must be a list")
    nodes: list = []
    for entry in document["nodes"]:
        if not isinstance(entry, dict):
            raise DomainError("PARSE_ERROR", "node entries must be objects")
        kind = entry.get("kind")
        if kind == "chance":
            _require_fields(
                entry, {"name": "", "kind": "", "predecessors": ""}, {"cpt": ""},
                f"chance node '{entry.get('name')}'",
            )
            name = str(entry["name"])
            if name not in variables:
                raise DomainError(
                    "PARSE_ERROR", f"chance node '{name}' has no variable declaration"
                )
            cpt = entry.get("cpt", {})
            if not isinstance(cpt, dict):
                raise DomainError("PARSE_ERROR", f"'cpt' of node '{name}' must be an object")
            try:
                table = {
                    str_to_row_key(str(key)): tuple(float(p) for p in row)
                    for key, row in cpt.items()
                }
            except (TypeError, ValueError) as exc:
                raise DomainError(
                    "PARSE_ERROR", f"node '{name}' has a non-numeric probability: {exc}"
                ) from None
            nodes.append(_checked_node(ChanceNode, variables[name],
                                       _str_predecessors(entry), table))
        elif kind == "decision":
            _require_fields(
                entry, {"name": "", "kind": "", "predecessors": ""}, {},
                f"decision node '{entry.get('name')}'",
            )
            name = str(entry["name"])
            if name not in variables:
                raise DomainError(
                    "PARSE_ERROR", f"decision node '{name}' has no variable declaration"
                )
            nodes.append(_checked_node(DecisionNode, variables[name], _str_predecessors(entry)))
        elif kind == "value":
            _require_fields(
                entry, {"name": "", "kind": "", "predecessors": ""}, {"utilities": ""},
                f"value node '{entry.get('name')}'",
            )
            utilities_field = entry.get("utilities", {})
            if not isinstance(utilities_field, dict):
                raise DomainError("PARSE_ERROR", "'utilities' must be an object")
            try:
                utilities = {
                    str_to_row_key(str(key)): float(u)
                    for key, u in utilities_field.items()
                }
            except (TypeError, ValueError) as exc:
                raise DomainError(
                    "PARSE_ERROR", f"value node has a non-numeric utility: {exc}"
                ) from None
            try:
                nodes.append(ValueNode(str(entry["name"]), _str_predecessors(entry), utilities))
            except (ValueError, TypeError) as exc:
                raise DomainError("PARSE_ERROR", f"bad value node: {exc}") from None
        else:
            raise DomainError(
                "PARSE_ERROR",
                f"node '{entry.get('name')}' has unknown kind {kind!r}",
            )

    return InfluenceDiagram(str(document["name"]), tuple(nodes))


def _str_predecessors(entry: dict) -> tuple[str, ...]:
    preds = entry.get("predecessors", [])
    if not isinstance(preds, list):
        raise DomainError("PARSE_ERROR", "'predecessors' must be a list")
    return tuple(str(p) for p in preds)


def _checked_node(cls, *args):
    try:
        return cls(*args)
    except (ValueError, TypeError) as exc:
        raise DomainError("PARSE_ERROR", f"bad node: {exc}") from None


def encode(diagram: InfluenceDiagram) -> str:
    """Canonical text form; requires a valid diagram."""
    report = validate(diagram)
    if not report.ok:
        raise DiagramValidationError(report, diagram)
    return json.dumps(diagram_to_document(diagram), indent=2) + "\n"


def decode(text: str) -> InfluenceDiagram:
    """Parse and fully validate a diagram document."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError("PARSE_ERROR", f"not valid JSON: {exc}") from None
    diagram = document_to_diagram(document)
    report = validate(diagram)
    if not report.ok:
        raise DiagramValidationError(report, diagram)
    return diagram


# -- schema library documents -------------------------------------------------

def document_to_library(document: Any) -> SchemaLibrary:
    if not isinstance(document, dict):
        raise DomainError("PARSE_ERROR", "library document must be a JSON object")
    _check_version(document, "library document")
    _require_fields(
        document, {"version": "", "features": "", "schemas": ""}, {}, "library document"
    )
    if not isinstance(document["features"], list):
        raise DomainError("PARSE_ERROR", "'features' must be a list")
    features = tuple(str(f) for f in document["features"])
    if not isinstance(document["schemas"], list):
        raise DomainError("PARSE_ERROR", "'schemas' must be a list")
    fragments = []
    for entry in document["schemas"]:
        if not isinstance(entry, dict):
            raise DomainError("PARSE_ERROR", "schema entries must be objects")
        _require_fields(
            entry,
            {"id": "", "priority": "", "applicability": "", "diagram": "", "slots": ""},
            {"description": ""},
            f"schema '{entry.get('id')}'",
        )
        if not isinstance(entry["slots"], list):
            raise DomainError("PARSE_ERROR", "'slots' must be a list")
        slots = []
        for slot_entry in entry["slots"]:
            if not isinstance(slot_entry, dict):
                raise DomainError("PARSE_ERROR", "slot entries must be objects")
            _require_fields(
                slot_entry,
                {"id": "", "kind": "", "node": ""},
                {"row": "", "prompt": ""},
                f"slot '{slot_entry.get('id')}'",
            )
            row = slot_entry.get("row")
            try:
                slots.append(
                    Slot(
                        id=str(slot_entry["id"]),
                        kind=str(slot_entry["kind"]),
                        node=str(slot_entry["node"]),
                        row=str_to_row_key(str(row)) if row is not None else None,
                        prompt=str(slot_entry.get("prompt", "")),
                    )
                )
            except ValueError as exc:
                raise DomainError("PARSE_ERROR", f"bad slot: {exc}") from None
        applicability = entry["applicability"]
        if not isinstance(applicability, dict):
            raise DomainError("PARSE_ERROR", "'applicability' must be an object")
        unknown = sorted(set(applicability) - set(features))
        if unknown:
            raise DomainError(
                "PARSE_ERROR",
                f"schema '{entry['id']}' applicability uses undeclared features: "
                f"{', '.join(unknown)}",
            )
        fragment = SchemaFragment(
            id=str(entry["id"]),
            priority=int(entry["priority"]),
            applicability={str(k): bool(v) for k, v in applicability.items()},
            diagram=document_to_diagram(entry["diagram"]),
            slots=tuple(slots),
            description=str(entry.get("description", "")),
        )
        check_fragment(fragment)
        fragments.append(fragment)
    fragments.sort(key=lambda f: (f.priority, f.id))
    return SchemaLibrary(features=features, fragments=tuple(fragments))


def library_to_document(library: SchemaLibrary) -> dict:
    return {
        "version": FORMAT_VERSION,
        "features": list(library.features),
        "schemas": [
            {
                "id": f.id,
                "priority": f.priority,
                "applicability": dict(sorted(f.applicability.items())),
                "description": f.description,
                "diagram": diagram_to_document(f.diagram),
                "slots": [
                    {
                        "id": s.id,
                        "kind": s.kind,
                        "node": s.node,
                        **({"row": row_key_to_str(s.row)} if s.row is not None else {}),
                        "prompt": s.prompt,
                    }
                    for s in f.slots
                ],
            }
            for f in library.fragments
        ],
    }


# -- session documents --------------------------------------------------------

def session_to_document(session: Session) -> dict:
    return {
        "version": FORMAT_VERSION,
        "id": session.id,
        "schema": session.schema_id,
        "features": dict(sorted(session.features.items())),
        "events": [
            {
                "seq": e.seq,
                "timestamp": e.timestamp,
                "kind": e.kind,
                "payload": e.payload,
            }
            for e in session.events
        ],
    }


def document_to_events(document: Any) -> list[SessionEvent]:
    if not isinstance(document, dict):
        raise DomainError("PARSE_ERROR", "session document must be a JSON object")
    _check_version(document, "session document")
    _require_fields(
        document,
        {"version": "", "id": "", "schema": "", "features": "", "events": ""},
        {},
        "session document",
    )
    events = []
    for entry in document["events"]:
        _require_fields(
            entry,
            {"seq": "", "timestamp": "", "kind": "", "payload": ""},
            {},
            "session event",
        )
        events.append(
            SessionEvent(
                seq=int(entry["seq"]),
                timestamp=float(entry["timestamp"]),
                kind=str(entry["kind"]),
                payload=entry["payload"],
            )
        )
    return events

# -- wire formats for the HTTP service and CLI ---------------------------------

def param_ref_to_document(ref: "ParamRef") -> dict:
    document: dict = {"node": ref.node, "row": row_key_to_str(ref.row)}
    if ref.outcome is not None:
        document["outcome"] = ref.outcome
    return document


def document_to_param_ref(document: Any) -> "ParamRef":
    if not isinstance(document, dict):
        raise DomainError("PARSE_ERROR", "'param' must be an object")
    _require_fields(document, {"node": "", "row": ""}, {"outcome": ""}, "param reference")
    outcome = document.get("outcome")
    return ParamRef(
        node=str(document["node"]),
        row=str_to_row_key(str(document["row"])),
        outcome=str(outcome) if outcome is not None else None,
    )


def _result_summary(diagram: InfluenceDiagram, result) -> dict:
    decision = first_decision(diagram)
    choice = first_stage_choice(diagram, result)
    return {
        "expected_utility": result.expected_utility,
        "recommended": decision.alternatives[choice] if choice is not None else None,
    }


def session_summary(session: Session) -> dict:
    summary = {
        "id": session.id,
        "phase": session.phase,
        "schema": session.schema_id,
        "features": dict(sorted(session.features.items())),
        "expected_utility": None,
        "recommended": None,
        "events": len(session.events),
    }
    if session.baseline is not None:
        summary.update(_result_summary(session.diagram, session.baseline))
    return summary


def tornado_entry_to_document(entry) -> dict:
    return {
        "param": param_ref_to_document(entry.param),
        "low": entry.low,
        "high": entry.high,
        "eu_low": entry.eu_low,
        "eu_high": entry.eu_high,
        "swing": entry.swing,
    }


def report_to_document(report) -> dict:
    return {
        "alternatives": list(report.alternatives),
        "recommended": report.recommended,
        "alternative_eus": {
            label: eu for label, eu in zip(report.alternatives, report.alternative_eus)
        },
        "expected_utility": report.expected_utility,
        "policy": {
            decision: [
                {"state": row_key_to_str(state), "choice": choice}
                for state, choice in table.items()
            ]
            for decision, table in report.policy.items()
        },
        "tornado": [tornado_entry_to_document(e) for e in report.tornado_entries],
        "trace": list(report.trace_summary),
    }


def whatif_to_document(diagram: InfluenceDiagram, result) -> dict:
    # apply_param never touches decision nodes, so the session diagram labels
    # both the trial and the baseline summary.
    return {
        "param": param_ref_to_document(result.param),
        "value": result.value,
        "trial": _result_summary(diagram, result.trial),
        "baseline": _result_summary(diagram, result.baseline),
        "changed_decision": result.changed_decision,
    }


def sweep_to_document(result) -> dict:
    return {
        "param": param_ref_to_document(result.param),
        "alternatives": list(result.alternatives),
        "points": [
            {
                "value": point.value,
                "alternative_eus": {
                    label: eu
                    for label, eu in zip(result.alternatives, point.alternative_eus)
                },
                "optimal_eu": point.optimal_eu,
                "optimal_alternative": (
                    result.alternatives[point.optimal_index]
                    if point.optimal_index is not None
                    else None
                ),
            }
            for point in result.points
        ],
    }


def library_summary(library: SchemaLibrary) -> dict:
    """What a client needs to drive schema selection and assessment forms."""
    schemas = []
    for fragment in library.fragments:
        slots = []
        for slot in fragment.slots:
            node = fragment.diagram.node(slot.node)
            entry: dict = {
                "id": slot.id,
                "kind": slot.kind,
                "node": slot.node,
                "prompt": slot.prompt,
            }
            if slot.row is not None:
                entry["row"] = row_key_to_str(slot.row)
            if slot.kind in ("cpt", "utility_table"):
                entry["rows"] = [
                    row_key_to_str(key)
                    for key in row_keys(fragment.diagram, node.predecessors)
                ]
            if slot.kind in ("cpt", "cpt_row"):
                entry["outcomes"] = list(node.outcomes)
            slots.append(entry)
        schemas.append(
            {
                "id": fragment.id,
                "priority": fragment.priority,
                "applicability": dict(sorted(fragment.applicability.items())),
                "description": fragment.description,
                "slots": slots,
            }
        )
    return {"features": list(library.features), "schemas": schemas}


def session_state_fingerprint(session: Session) -> str:
    """Hash of the session's model state (everything except the event log).

    What-if trials append to the log but must leave this fingerprint
    untouched; commits and bindings change it.
    """
    state = {
        "id": session.id,
        "phase": session.phase,
        "schema": session.schema_id,
        "features": dict(sorted(session.features.items())),
        "diagram": diagram_to_document(session.diagram) if session.diagram else None,
        "baseline": (
            {
                "expected_utility": session.baseline.expected_utility,
                "policy": {
                    name: {row_key_to_str(k): v for k, v in sorted(table.items())}
                    for name, table in sorted(session.baseline.policy.items())
                },
            }
            if session.baseline
            else None
        ),
    }
    return hashlib.sha256(json.dumps(state, sort_keys=True).encode()).hexdigest()
