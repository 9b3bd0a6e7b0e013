"""The three-phase consultation state machine.

A session moves FORMULATE -> ASSESS -> REFINE and never back: first a
schema is selected from the user's decision features, then one bindings
step instantiates and solves it (ASSESS is passed through atomically), and
finally the user refines the model interactively -- trial what-if changes,
committed changes, and recommendation reports.

Sessions are event-sourced: every state change appends an event, and
replaying the log through the same library reconstructs the session
exactly. What-if trials are logged but do not change state.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field

from .diagram import InfluenceDiagram, canonicalize
from .errors import DomainError
from .schemas import SchemaLibrary, select_schema, instantiate
from .sensitivity import (
    ParamRef,
    TornadoEntry,
    all_probability_params,
    apply_param,
    first_decision,
    first_stage_choice,
    forced_alternative_eus,
    parse_param_label,
    tornado,
)
from .solver import SolveResult, describe_step, solve

FORMULATE = "FORMULATE"
ASSESS = "ASSESS"
REFINE = "REFINE"


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    timestamp: float
    kind: str
    payload: dict


@dataclass
class Session:
    id: str
    features: dict[str, bool]
    schema_id: str
    phase: str = FORMULATE
    diagram: InfluenceDiagram | None = None
    baseline: SolveResult | None = None
    events: list[SessionEvent] = field(default_factory=list)

    def log(self, kind: str, payload: dict, timestamp: float | None = None) -> SessionEvent:
        event = SessionEvent(
            seq=len(self.events),
            timestamp=time.time() if timestamp is None else timestamp,
            kind=kind,
            payload=payload,
        )
        self.events.append(event)
        return event

    def require_phase(self, phase: str) -> None:
        if self.phase != phase:
            raise DomainError(
                "WRONG_PHASE",
                f"operation requires phase {phase}, session is in {self.phase}",
                phase=self.phase,
            )


@dataclass(frozen=True)
class WhatIfResult:
    param: ParamRef
    value: float
    trial: SolveResult
    baseline: SolveResult
    changed_decision: bool


@dataclass(frozen=True)
class RecommendationReport:
    """Everything needed to explain the current recommendation."""

    alternatives: tuple[str, ...]
    recommended: str | None
    alternative_eus: tuple[float, ...]
    expected_utility: float
    policy: dict[str, dict[tuple[str, ...], str]]
    tornado_entries: tuple[TornadoEntry, ...]
    trace_summary: tuple[str, ...]


def start_session(
    features: dict[str, bool],
    library: SchemaLibrary,
    session_id: str | None = None,
) -> Session:
    """Select a schema for the features and open a FORMULATE-phase session."""
    fragment = select_schema(features, library)
    session = Session(
        id=session_id or uuid.uuid4().hex,
        features=dict(features),
        schema_id=fragment.id,
    )
    session.log(
        "SESSION_STARTED",
        {"id": session.id, "features": dict(features), "schema": fragment.id},
    )
    return session


def provide_bindings(
    session: Session, bindings: dict[str, object], library: SchemaLibrary
) -> Session:
    """Instantiate the selected schema, solve it, and enter REFINE.

    Atomic: any instantiation error leaves the session in FORMULATE with
    only a rejection event appended.
    """
    session.require_phase(FORMULATE)
    fragment = library.fragment(session.schema_id)
    try:
        diagram = canonicalize(instantiate(fragment, bindings))
    except DomainError as err:
        session.log("BINDINGS_REJECTED", {"code": err.code, "message": err.message})
        raise
    result = solve(diagram)
    session.log("BINDINGS_ACCEPTED", {"bindings": bindings})
    session.phase = ASSESS
    session.diagram = diagram
    session.log("BASELINE_SOLVED", {"expected_utility": result.expected_utility})
    session.phase = REFINE
    session.baseline = result
    return session


def whatif(session: Session, ref: ParamRef, value: float) -> WhatIfResult:
    """Evaluate one trial change without touching the session's model."""
    session.require_phase(REFINE)
    trial_diagram = apply_param(session.diagram, ref, value)
    trial = solve(trial_diagram)
    changed = first_stage_choice(trial_diagram, trial) != first_stage_choice(
        session.diagram, session.baseline
    )
    session.log(
        "WHATIF_EVALUATED",
        {
            "param": ref.label(),
            "value": value,
            "expected_utility": trial.expected_utility,
            "changed_decision": changed,
        },
    )
    return WhatIfResult(ref, value, trial, session.baseline, changed)


def commit(session: Session, ref: ParamRef, value: float) -> Session:
    """Apply a change to the session's model and re-solve.

    Atomic: errors leave diagram and baseline untouched. The previous model
    remains recoverable by replaying the log without the last commit.
    """
    session.require_phase(REFINE)
    diagram = apply_param(session.diagram, ref, value)
    result = solve(diagram)
    session.diagram = diagram
    session.baseline = result
    session.log("COMMIT_APPLIED", {"param": ref.label(), "value": value})
    return session


TORNADO_TOP_K = 3
TORNADO_DELTA = 0.1


def report(session: Session, top_k: int = TORNADO_TOP_K) -> RecommendationReport:
    """Assemble the recommendation for the current baseline.

    Per-alternative expected utilities force each first-stage alternative
    (a one-row constant decision) and re-solve with later decisions free;
    the tornado ranks every CPT entry swept +-0.1, clamped into [0, 1].
    Pure: repeated calls return identical reports and log nothing.
    """
    session.require_phase(REFINE)
    diagram = session.diagram
    decision = first_decision(diagram)
    alternatives = decision.alternatives if decision is not None else ()
    eus = forced_alternative_eus(diagram)
    choice = first_stage_choice(diagram, session.baseline)
    recommended = alternatives[choice] if choice is not None else None

    policy: dict[str, dict[tuple[str, ...], str]] = {}
    for name, table in sorted(session.baseline.policy.items()):
        node = diagram.node(name)
        policy[name] = {
            state: node.alternatives[idx] for state, idx in sorted(table.items())
        }

    entries = [
        e for e in tornado(diagram, all_probability_params(diagram, TORNADO_DELTA))
        if e.swing > 0.0
    ]
    trace_summary = tuple(describe_step(step) for step in session.baseline.trace)
    return RecommendationReport(
        alternatives=alternatives,
        recommended=recommended,
        alternative_eus=eus,
        expected_utility=session.baseline.expected_utility,
        policy=policy,
        tornado_entries=tuple(entries[:top_k]),
        trace_summary=trace_summary,
    )


def replay(events: list[SessionEvent], library: SchemaLibrary) -> Session:
    """Rebuild a session from its event log.

    Events are re-applied in order through the same operations that created
    them, so derived state (diagram, baseline) is recomputed rather than
    stored; the returned session compares equal to the live one.
    """
    if not events or events[0].kind != "SESSION_STARTED":
        raise DomainError("PARSE_ERROR", "event log does not begin with SESSION_STARTED")
    started = events[0]
    session = Session(
        id=str(started.payload["id"]),
        features={str(k): bool(v) for k, v in started.payload["features"].items()},
        schema_id=str(started.payload["schema"]),
    )
    for event in events:
        if event.kind == "BINDINGS_ACCEPTED":
            fragment = library.fragment(session.schema_id)
            session.diagram = canonicalize(
                instantiate(fragment, event.payload["bindings"])
            )
            session.phase = ASSESS
        elif event.kind == "BASELINE_SOLVED":
            session.baseline = solve(session.diagram)
            session.phase = REFINE
        elif event.kind == "COMMIT_APPLIED":
            ref = parse_param_label(str(event.payload["param"]))
            session.diagram = apply_param(session.diagram, ref, float(event.payload["value"]))
            session.baseline = solve(session.diagram)
        # SESSION_STARTED is consumed above; WHATIF_EVALUATED and
        # BINDINGS_REJECTED do not change state.
    session.events = list(events)
    return session
