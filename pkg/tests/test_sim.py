"""Simulated runs: virtual time, scheduled events, budgets, determinism."""

import pytest

from caretree import (
    Blackboard,
    BudgetExceededError,
    Duration,
    LeafBindings,
    PendingExternalError,
    Scenario,
    ScheduledEvent,
    Scripted,
    Status,
    Stochastic,
    External,
    estimate_success_probability,
    load_scenario,
    parse_tree,
    run,
    run_scenario,
)
from caretree.bindings import behavior_from_spec

S = Status.SUCCESS
F = Status.FAILURE


def test_leaf_durations_consume_virtual_time():
    tree = parse_tree("root\n  sequence\n    action scrub\n    action draw\n")
    bindings = LeafBindings(
        {
            "scrub": behavior_from_spec({"type": "constant_success", "duration": "2m"}),
            "draw": behavior_from_spec({"type": "constant_success", "duration": "3m"}),
        }
    )
    result = run(tree, bindings)
    assert result.status is S
    assert result.time == 300.0
    assert result.ticks == 1


def test_timer_waits_jump_the_clock():
    tree = parse_tree("root\n  timer poll\n    query check\n")
    bindings = LeafBindings({"check": Scripted([F, F, S])})
    result = run(tree, bindings, blackboard=Blackboard({"poll": Duration(600)}))
    assert result.status is S
    assert result.time == 1800.0  # third firing
    assert result.ticks < 10


def test_scheduled_event_unblocks_a_condition():
    tree = parse_tree(
        "root\n  repeat-until calcium_ok == true\n    action recheck\n"
    )
    # rechecks burn no time; the 1h event flips the flag between ticks
    bindings = LeafBindings(
        {"recheck": behavior_from_spec({"type": "constant_failure", "duration": "15m"})}
    )
    events = [ScheduledEvent(at=3600.0, key="calcium_ok", value=True)]
    result = run(
        tree, bindings, blackboard=Blackboard({"calcium_ok": False}), events=events
    )
    assert result.status is S
    assert result.blackboard["calcium_ok"] is True
    applied = result.trace.of_kind("event_applied")
    assert len(applied) == 1 and applied[0].time >= 3600.0


def test_event_can_change_a_timer_period_mid_run():
    tree = parse_tree("root\n  timer interval\n    query sample\n")
    bindings = LeafBindings({"sample": Scripted([F, F, S])})
    events = [ScheduledEvent(at=12 * 3600.0, key="interval", value=Duration(2 * 3600))]
    result = run(
        tree,
        bindings,
        blackboard=Blackboard({"interval": Duration(6 * 3600)}),
        events=events,
    )
    # failed firings at 6h and 12h; the event lands just before the 12h
    # firing, so its reschedule reads the new 2h period: success at 14h
    assert result.status is S
    assert result.time == 14 * 3600.0


def test_run_blocked_on_external_input_raises():
    tree = parse_tree("root\n  sequence\n    query confirm\n")
    with pytest.raises(PendingExternalError) as exc:
        run(tree, LeafBindings({"confirm": External()}))
    assert exc.value.leaf_names == ["confirm"]


def test_tick_budget_is_a_distinct_error():
    tree = parse_tree("root\n  repeat-until done == true\n    action spin\n")
    bindings = LeafBindings({"spin": behavior_from_spec({"type": "constant_failure"})})
    with pytest.raises(BudgetExceededError) as exc:
        run(tree, bindings, blackboard=Blackboard({"done": False}), budget_ticks=50)
    assert exc.value.budget == "ticks"


def test_time_budget_stops_long_waits():
    tree = parse_tree("root\n  timer poll\n    query check\n")
    bindings = LeafBindings({"check": Scripted([F] * 100)})
    with pytest.raises(BudgetExceededError) as exc:
        run(
            tree,
            bindings,
            blackboard=Blackboard({"poll": Duration(3600)}),
            budget_time=2.5 * 3600,
        )
    assert exc.value.budget == "time"


def test_identical_seeds_reproduce_the_run_exactly():
    tree = parse_tree("root\n  retry 5\n    action attempt\n")
    results = [
        run(tree, LeafBindings({"attempt": Stochastic(0.4)}), seed=123) for _ in range(2)
    ]
    first, second = (r.trace.to_jsonl() for r in results)
    assert first == second
    assert results[0].status is results[1].status


def test_different_seeds_can_differ():
    tree = parse_tree("root\n  action attempt\n")
    outcomes = {
        run(tree, LeafBindings({"attempt": Stochastic(0.5)}), seed=s).status
        for s in range(40)
    }
    assert outcomes == {S, F}


def test_binding_writes_apply_on_success():
    tree = parse_tree("root\n  sequence\n    action give_drug\n    query took_effect\n")
    bindings = LeafBindings(
        {
            "give_drug": behavior_from_spec(
                {"type": "constant_success", "writes": {"dosed": True}}
            ),
            "took_effect": behavior_from_spec({"type": "predicate", "condition": "dosed == true"}),
        }
    )
    result = run(tree, bindings)
    assert result.status is S
    assert result.blackboard["dosed"] is True


class TestScenarioFiles:
    RAW = {
        "name": "drill",
        "tree": "root\n  retry 3\n    action attempt\n",
        "blackboard": {"poll": {"duration": "30s"}},
        "bindings": {
            "attempt": {"type": "scripted", "outcomes": ["failure", "success"], "duration": "1m"}
        },
        "events": [{"at": "2h", "key": "poll", "value": {"duration": "10s"}}],
        "seed": 9,
        "budget": {"ticks": 500, "time": "6h"},
    }

    def test_loads_every_field(self):
        scenario = load_scenario(self.RAW)
        assert scenario.name == "drill"
        assert scenario.blackboard["poll"] == Duration(30)
        assert scenario.events[0].at == 7200.0
        assert scenario.budget_ticks == 500
        assert scenario.budget_time == 6 * 3600.0
        assert scenario.seed == 9

    def test_runs_from_scenario(self):
        result = run_scenario(load_scenario(self.RAW))
        assert result.status is S
        assert result.time == 120.0  # two one-minute attempts
        assert result.seed == 9

    def test_scenario_requires_a_tree_source(self):
        scenario = load_scenario({"name": "empty"})
        with pytest.raises(ValueError):
            run_scenario(scenario)


class TestProbabilityEstimates:
    def test_single_leaf_matches_its_bias(self):
        scenario = Scenario(
            tree_text="root\n  action attempt\n",
            bindings={"attempt": {"type": "stochastic", "p": 0.7}},
        )
        estimate = estimate_success_probability(scenario, trials=1000, base_seed=5)
        assert abs(estimate - 0.7) < 0.05

    def test_retry_three_of_a_coin_flip(self):
        # 1 - 0.5^3
        scenario = Scenario(
            tree_text="root\n  retry 3\n    action attempt\n",
            bindings={"attempt": {"type": "stochastic", "p": 0.5}},
        )
        estimate = estimate_success_probability(scenario, trials=1000, base_seed=11)
        assert abs(estimate - 0.875) < 0.05

    def test_estimates_are_reproducible(self):
        scenario = Scenario(
            tree_text="root\n  action attempt\n",
            bindings={"attempt": {"type": "stochastic", "p": 0.3}},
        )
        a = estimate_success_probability(scenario, trials=200, base_seed=42)
        b = estimate_success_probability(scenario, trials=200, base_seed=42)
        assert a == b
