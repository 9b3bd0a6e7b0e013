"""The brute-force policy enumerator used as the independent reference."""

from __future__ import annotations

import random

import pytest

from decision_workbench.diagram import (
    ChanceNode,
    DecisionNode,
    InfluenceDiagram,
    Variable,
    ValueNode,
    canonicalize,
)
from decision_workbench.errors import DomainError
from decision_workbench.oracle import evaluate_policy, policy_slots, solve_oracle

from conftest import prognosis, random_diagram, simple_treatment


def test_simple_treatment_by_enumeration():
    result = solve_oracle(canonicalize(simple_treatment()))
    # two policies, two outcomes each: 0.6*100 beats 0.2*100
    assert result.expected_utility == pytest.approx(60.0)
    assert result.policy == {"T": {(): 0}}
    assert result.trace == ()


def test_chance_only_diagram_has_empty_policy():
    c = ChanceNode(Variable("C", ("up", "down")), (), {(): (0.25, 0.75)})
    v = ValueNode("V", ("C",), {("up",): 80.0, ("down",): 20.0})
    result = solve_oracle(InfluenceDiagram("drift", (c, v)))
    assert result.policy == {}
    assert result.expected_utility == pytest.approx(0.25 * 80 + 0.75 * 20)


def test_policy_slots_enumerate_information_states():
    diagram = canonicalize(prognosis(informed=True))
    assert policy_slots(diagram) == [("T", ("good",)), ("T", ("bad",))]


def test_policy_space_guard():
    observed = [ChanceNode(Variable(f"c{k}", ("a", "b")), (), {(): (0.5, 0.5)}) for k in range(10)]
    decision = DecisionNode(
        Variable("D", ("x", "y")), tuple(node.name for node in observed)
    )
    value = ValueNode("V", ("D",), {("x",): 1.0, ("y",): 0.0})
    diagram = InfluenceDiagram("wide", (*observed, decision, value))
    with pytest.raises(DomainError) as err:
        solve_oracle(diagram)
    assert err.value.code == "TOO_LARGE"


def test_joint_state_guard():
    chain = [ChanceNode(Variable(f"c{k}", ("a", "b")), (), {(): (0.5, 0.5)}) for k in range(17)]
    value = ValueNode("V", ("c0",), {("a",): 1.0, ("b",): 0.0})
    diagram = InfluenceDiagram("long", (*chain, value))
    with pytest.raises(DomainError) as err:
        solve_oracle(diagram)
    assert err.value.code == "TOO_LARGE"


def test_evaluate_policy_matches_hand_expectation():
    diagram = canonicalize(prognosis(informed=True))
    listen = {"T": {("good",): 0, ("bad",): 1}}
    contrarian = {"T": {("good",): 1, ("bad",): 0}}
    assert evaluate_policy(diagram, listen) == pytest.approx(0.5 * 100 + 0.5 * 40)
    assert evaluate_policy(diagram, contrarian) == pytest.approx(0.5 * 40 + 0.5 * 0)


def test_ties_resolve_to_first_enumerated_policy():
    d = DecisionNode(Variable("D", ("l", "r")))
    v = ValueNode("V", ("D",), {("l",): 1.0, ("r",): 1.0})
    result = solve_oracle(InfluenceDiagram("flat", (d, v)))
    assert result.policy == {"D": {(): 0}}


def test_random_diagrams_stay_within_guards():
    rng = random.Random(53)
    for _ in range(100):
        diagram = canonicalize(random_diagram(rng))
        result = solve_oracle(diagram)
        assert result.expected_utility == pytest.approx(
            evaluate_policy(diagram, result.policy)
        )
