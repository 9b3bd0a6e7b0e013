"""Shared fixtures: hand-built diagrams and seeded random generators.

The hand-built diagrams are the worked examples used throughout the test
suite; every expected number asserted against them is recomputed by the
brute-force oracle (or by inline enumeration) before being trusted.
"""

from __future__ import annotations

import itertools
import random

import pytest

from decision_workbench.diagram import (
    ChanceNode,
    DecisionNode,
    InfluenceDiagram,
    Variable,
    ValueNode,
    project,
)


def simple_treatment() -> InfluenceDiagram:
    """One treat-or-wait decision, an uncertain outcome, utility on the outcome."""
    treat = DecisionNode(Variable("T", ("treat", "wait")))
    outcome = ChanceNode(
        Variable("O", ("success", "failure")),
        ("T",),
        {("treat",): (0.6, 0.4), ("wait",): (0.2, 0.8)},
    )
    value = ValueNode("V", ("O",), {("success",): 100.0, ("failure",): 0.0})
    return InfluenceDiagram("simple-treatment", (treat, outcome, value))


def prognosis(informed: bool = False) -> InfluenceDiagram:
    """Payoff depends on an unobserved prognosis; optionally observed first."""
    state = ChanceNode(Variable("S", ("good", "bad")), (), {(): (0.5, 0.5)})
    choice = DecisionNode(Variable("T", ("treat", "wait")), ("S",) if informed else ())
    value = ValueNode(
        "V",
        ("S", "T"),
        {
            ("good", "treat"): 100.0,
            ("good", "wait"): 40.0,
            ("bad", "treat"): 0.0,
            ("bad", "wait"): 40.0,
        },
    )
    return InfluenceDiagram("prognosis", (state, choice, value))


def signal_pair() -> InfluenceDiagram:
    """Two chance nodes X -> Y plus a value node, for arc-reversal tests."""
    x = ChanceNode(Variable("X", ("x1", "x0")), (), {(): (0.5, 0.5)})
    y = ChanceNode(
        Variable("Y", ("y1", "y0")),
        ("X",),
        {("x1",): (0.8, 0.2), ("x0",): (0.4, 0.6)},
    )
    value = ValueNode("V", ("Y",), {("y1",): 1.0, ("y0",): 0.0})
    return InfluenceDiagram("signal", (x, y, value))


def hidden_signal() -> InfluenceDiagram:
    """Hidden state X, observed signal Y, decision informed only by Y.

    Solving this diagram requires an arc reversal (X must be flipped over Y
    before either can be absorbed into the value node).
    """
    x = ChanceNode(Variable("X", ("x1", "x0")), (), {(): (0.3, 0.7)})
    y = ChanceNode(
        Variable("Y", ("y1", "y0")),
        ("X",),
        {("x1",): (0.9, 0.1), ("x0",): (0.2, 0.8)},
    )
    act = DecisionNode(Variable("D", ("act", "pass")), ("Y",))
    value = ValueNode(
        "V",
        ("X", "D"),
        {
            ("x1", "act"): 100.0,
            ("x1", "pass"): 0.0,
            ("x0", "act"): -40.0,
            ("x0", "pass"): 0.0,
        },
    )
    return InfluenceDiagram("hidden-signal", (x, y, act, value))


def _random_row(rng: random.Random, width: int) -> tuple[float, ...]:
    # Entries kept away from 0 and 1 so Bayes reversals never divide by zero.
    weights = [rng.uniform(0.05, 0.95) for _ in range(width)]
    total = sum(weights)
    return tuple(w / total for w in weights)


def random_diagram(
    rng: random.Random,
    max_chance: int = 4,
    max_decisions: int = 2,
) -> InfluenceDiagram:
    """A random valid diagram with binary variables.

    Decisions take at most one chance predecessor (plus the arc ordering
    them), which keeps the policy space small enough for the brute-force
    oracle while still exercising information arcs and no-forgetting.
    """
    n_chance = rng.randint(1, max_chance)
    n_decisions = rng.randint(0, max_decisions)
    chance_names = [f"c{k}" for k in range(n_chance)]
    decision_names = [f"d{k}" for k in range(n_decisions)]

    order: list[str] = list(chance_names)
    for name in decision_names:
        order.insert(rng.randint(0, len(order)), name)
    # keep relative decision order d0 < d1
    if n_decisions == 2 and order.index("d0") > order.index("d1"):
        a, b = order.index("d0"), order.index("d1")
        order[a], order[b] = order[b], order[a]

    nodes: list = []
    for position, name in enumerate(order):
        earlier = order[:position]
        if name.startswith("c"):
            candidates = [e for e in earlier if rng.random() < 0.5]
            preds = tuple(candidates[:2])
            variable = Variable(name, (f"{name}_a", f"{name}_b"))
            table = {
                combo: _random_row(rng, 2)
                for combo in itertools.product(*[(f"{p}_a", f"{p}_b") for p in preds])
            }
            nodes.append(ChanceNode(variable, preds, table))
        else:
            informers = [e for e in earlier if e.startswith("c") and rng.random() < 0.5]
            preds = tuple(informers[:1])
            if name == "d1":
                preds = ("d0",) + preds  # the arc that orders the decisions
            nodes.append(DecisionNode(Variable(name, (f"{name}_a", f"{name}_b")), preds))

    pool = list(order)
    rng.shuffle(pool)
    value_preds = sorted(pool[: rng.randint(1, min(3, len(pool)))])
    # decisions that matter make the policy comparison meaningful
    for name in decision_names:
        if name not in value_preds and rng.random() < 0.7 and len(value_preds) < 3:
            value_preds.append(name)
    value_preds = sorted(set(value_preds))
    utilities = {
        combo: rng.uniform(0.0, 100.0)
        for combo in itertools.product(*[(f"{p}_a", f"{p}_b") for p in value_preds])
    }
    nodes.append(ValueNode("v", tuple(value_preds), utilities))
    return InfluenceDiagram(f"random-{rng.randint(0, 10**9)}", tuple(nodes))


def random_chance_diagram(rng: random.Random, n_chance: int = 3) -> InfluenceDiagram:
    """Random diagram of chance nodes only (plus a value node), with dense
    chance-to-chance arcs for reversal tests."""
    names = [f"c{k}" for k in range(n_chance)]
    nodes: list = []
    for position, name in enumerate(names):
        preds = tuple(e for e in names[:position] if rng.random() < 0.6)
        table = {
            combo: _random_row(rng, 2)
            for combo in itertools.product(*[(f"{p}_a", f"{p}_b") for p in preds])
        }
        nodes.append(ChanceNode(Variable(name, (f"{name}_a", f"{name}_b")), preds, table))
    pool = list(names)
    rng.shuffle(pool)
    value_preds = tuple(sorted(pool[: rng.randint(1, 2)]))
    utilities = {
        combo: rng.uniform(0.0, 100.0)
        for combo in itertools.product(*[(f"{p}_a", f"{p}_b") for p in value_preds])
    }
    nodes.append(ValueNode("v", value_preds, utilities))
    return InfluenceDiagram(f"chain-{rng.randint(0, 10**9)}", tuple(nodes))


def chance_joint(diagram: InfluenceDiagram) -> dict[tuple[str, ...], float]:
    """Joint distribution over all chance nodes, computed directly from the
    CPT product (independent of the solver)."""
    chance = [n for n in diagram.nodes if isinstance(n, ChanceNode)]
    names = [n.name for n in chance]
    joint: dict[tuple[str, ...], float] = {}
    for combo in itertools.product(*[n.outcomes for n in chance]):
        assignment = dict(zip(names, combo))
        p = 1.0
        for node in chance:
            row = node.table[project(assignment, node.predecessors)]
            p *= row[node.variable.index_of(assignment[node.name])]
        joint[combo] = p
    return joint


@pytest.fixture
def d_simple() -> InfluenceDiagram:
    return simple_treatment()


@pytest.fixture
def d_prognosis() -> InfluenceDiagram:
    return prognosis()


@pytest.fixture
def d_signal() -> InfluenceDiagram:
    return signal_pair()
