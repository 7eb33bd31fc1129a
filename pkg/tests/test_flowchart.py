"""Flowchart validation, execution, compilation, and equivalence checking."""

import random

import pytest

from caretree import ConversionError, MissingOutcomeError, Status, parse_tree, structural_equal
from caretree.flowchart import (
    check_equivalence,
    convert_to_bt,
    execute_flowchart,
    parse_flowchart,
    run_tree_on_decisions,
    validate_flowchart,
    _immediate_postdominator,
    _postdominators,
)
from caretree.generate import random_flowchart

LINEAR = {
    "name": "linear",
    "start": "s",
    "nodes": {
        "s": {"type": "start", "next": "p1"},
        "p1": {"type": "process", "action": "prep", "next": "p2"},
        "p2": {"type": "process", "action": "draw", "next": "e"},
        "e": {"type": "end", "outcome": "success"},
    },
}

DIAMOND = {
    "name": "diamond",
    "start": "s",
    "nodes": {
        "s": {"type": "start", "next": "d1"},
        "d1": {"type": "decision", "condition": "SpO2 < 93", "true": "pt", "false": "pf"},
        "pt": {"type": "process", "action": "treat", "next": "pj"},
        "pf": {"type": "process", "action": "skip", "next": "pj"},
        "pj": {"type": "process", "action": "finish", "next": "e"},
        "e": {"type": "end", "outcome": "success"},
    },
}

FALSE_ARM_FAILURE = {
    "name": "guarded",
    "start": "s",
    "nodes": {
        "s": {"type": "start", "next": "d1"},
        "d1": {"type": "decision", "condition": "ready == true", "true": "p1", "false": "ef"},
        "p1": {"type": "process", "action": "proceed", "next": "es"},
        "es": {"type": "end", "outcome": "success"},
        "ef": {"type": "end", "outcome": "failure"},
    },
}


class TestValidation:
    def test_well_formed(self):
        assert validate_flowchart(parse_flowchart(DIAMOND)) == []

    def test_dangling_reference(self):
        raw = {
            "name": "x",
            "start": "s",
            "nodes": {"s": {"type": "start", "next": "ghost"}},
        }
        problems = validate_flowchart(parse_flowchart(raw))
        assert any("ghost" in p for p in problems)

    def test_cycle_reported(self):
        raw = {
            "name": "loop",
            "start": "s",
            "nodes": {
                "s": {"type": "start", "next": "p1"},
                "p1": {"type": "process", "action": "a", "next": "p2"},
                "p2": {"type": "process", "action": "b", "next": "p1"},
                "e": {"type": "end", "outcome": "success"},
            },
        }
        problems = validate_flowchart(parse_flowchart(raw))
        assert any("cycle" in p for p in problems)
        assert any("not reachable" in p for p in problems)

    def test_bad_condition_text(self):
        raw = dict(DIAMOND, nodes=dict(DIAMOND["nodes"]))
        raw["nodes"]["d1"] = dict(raw["nodes"]["d1"], condition="SpO2 <")
        assert any("condition" in p for p in validate_flowchart(parse_flowchart(raw)))

    def test_round_trips_through_dict(self):
        chart = parse_flowchart(DIAMOND)
        assert parse_flowchart(chart.to_dict()) == chart


class TestExecution:
    def test_linear_run(self):
        run = execute_flowchart(parse_flowchart(LINEAR), {})
        assert run.outcome is Status.SUCCESS
        assert run.actions == ["prep", "draw"]

    def test_branches_follow_answers(self):
        chart = parse_flowchart(DIAMOND)
        yes = execute_flowchart(chart, {"d1": True})
        no = execute_flowchart(chart, {"d1": False})
        assert yes.actions == ["treat", "finish"]
        assert no.actions == ["skip", "finish"]

    def test_missing_answer_raises(self):
        with pytest.raises(MissingOutcomeError):
            execute_flowchart(parse_flowchart(DIAMOND), {})

    def test_failure_end(self):
        run = execute_flowchart(parse_flowchart(FALSE_ARM_FAILURE), {"d1": False})
        assert run.outcome is Status.FAILURE
        assert run.actions == []


class TestPostdominators:
    def test_diamond_join(self):
        chart = parse_flowchart(DIAMOND)
        pd = _postdominators(chart)
        assert _immediate_postdominator(pd, "d1") == "pj"
        assert _immediate_postdominator(pd, "pt") == "pj"

    def test_early_end_collapses_join_to_exit(self):
        chart = parse_flowchart(FALSE_ARM_FAILURE)
        pd = _postdominators(chart)
        assert _immediate_postdominator(pd, "d1") == "#exit"


class TestConversion:
    def test_linear_chain_becomes_sequence(self):
        tree = convert_to_bt(parse_flowchart(LINEAR))
        expected = parse_tree("root\n  sequence\n    action prep\n    action draw\n")
        assert structural_equal(tree, expected)

    def test_diamond_shares_the_join_suffix(self):
        tree = convert_to_bt(parse_flowchart(DIAMOND))
        expected = parse_tree(
            'root\n'
            '  sequence\n'
            '    selector\n'
            '      sequence\n'
            '        query d1 "SpO2 < 93"\n'
            '        action treat\n'
            '      action skip\n'
            '    action finish\n'
        )
        assert structural_equal(tree, expected)
        # the shared suffix is emitted once
        assert sum(1 for n in tree.leaves() if n.name == "finish") == 1

    def test_false_arm_failure_uses_fail_leaf(self):
        tree = convert_to_bt(parse_flowchart(FALSE_ARM_FAILURE))
        expected = parse_tree(
            'root\n'
            '  selector\n'
            '    sequence\n'
            '      query d1 "ready == true"\n'
            '      action proceed\n'
            '    query _fail\n'
        )
        assert structural_equal(tree, expected)

    def test_true_arm_failure_is_rejected(self):
        raw = {
            "name": "bad",
            "start": "s",
            "nodes": {
                "s": {"type": "start", "next": "d1"},
                "d1": {"type": "decision", "condition": "x == 1", "true": "ef", "false": "es"},
                "ef": {"type": "end", "outcome": "failure"},
                "es": {"type": "end", "outcome": "success"},
            },
        }
        with pytest.raises(ConversionError) as exc:
            convert_to_bt(parse_flowchart(raw))
        assert "true branch" in str(exc.value)

    def test_nested_true_arm_failure_is_rejected_too(self):
        raw = {
            "name": "bad_nested",
            "start": "s",
            "nodes": {
                "s": {"type": "start", "next": "d1"},
                "d1": {"type": "decision", "condition": "a == 1", "true": "d2", "false": "es2"},
                "d2": {"type": "decision", "condition": "b == 1", "true": "p1", "false": "ef"},
                "p1": {"type": "process", "action": "work", "next": "es"},
                "ef": {"type": "end", "outcome": "failure"},
                "es": {"type": "end", "outcome": "success"},
                "es2": {"type": "end", "outcome": "success"},
            },
        }
        # d2's false arm may fail, so d2 may fail, and d2 sits on d1's true arm
        with pytest.raises(ConversionError):
            convert_to_bt(parse_flowchart(raw))

    def test_invalid_chart_raises_conversion_error(self):
        with pytest.raises(ConversionError):
            convert_to_bt(parse_flowchart({"name": "x", "start": "s", "nodes": {}}))


class TestEquivalence:
    def test_diamond_is_equivalent_exhaustively(self):
        chart = parse_flowchart(DIAMOND)
        report = check_equivalence(chart)
        assert report.equivalent and report.exhaustive
        assert report.trials == 2

    def test_detects_wrong_action_order(self):
        chart = parse_flowchart(LINEAR)
        wrong = parse_tree("root\n  sequence\n    action draw\n    action prep\n")
        report = check_equivalence(chart, wrong)
        assert not report.equivalent
        assert report.counterexample["flowchart"]["actions"] == ["prep", "draw"]

    def test_detects_wrong_outcome(self):
        chart = parse_flowchart(FALSE_ARM_FAILURE)
        wrong = parse_tree(
            'root\n'
            '  selector\n'
            '    sequence\n'
            '      query d1\n'
            '      action proceed\n'
            '    query _pass\n'  # swallows the failure
        )
        report = check_equivalence(chart, wrong)
        assert not report.equivalent

    def test_synthetic_leaves_do_not_appear_as_actions(self):
        chart = parse_flowchart(FALSE_ARM_FAILURE)
        tree = convert_to_bt(chart)
        status, actions = run_tree_on_decisions(tree, {"d1": False})
        assert status is Status.FAILURE
        assert actions == []


def test_random_charts_convert_and_agree():
    rng = random.Random(7321)
    converted = 0
    for i in range(150):
        chart = random_flowchart(rng, name=f"chart_{i}")
        assert validate_flowchart(chart) == [], chart.to_dict()
        tree = convert_to_bt(chart)
        report = check_equivalence(chart, tree, trials=64, seed=i)
        assert report.equivalent, (chart.to_dict(), report.counterexample)
        converted += 1
    assert converted == 150
