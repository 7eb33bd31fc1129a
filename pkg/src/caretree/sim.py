"""Batch simulation: drive a tree to completion on a virtual clock.

Time only moves for a reason: leaf durations consume it mid-tick, and when a
tick passes without a single trace event the loop jumps straight to the next
thing that could change anything — a timer coming due or a scheduled
blackboard write. A run that is still Running with nothing left to wait for
is a deadlock, not a long wait.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .bindings import LeafBindings, bindings_from_specs
from .blackboard import Blackboard
from .clock import VirtualClock
from .engine import Engine, RuntimeState
from .errors import BudgetExceededError, DeadlockError, PendingExternalError
from .trace import EVENT_APPLIED, ExecutionTrace
from .tree import BehaviorTree, Status
from .values import TypedValue, parse_duration, value_from_json

TICK_BUDGET_DEFAULT = 10_000


@dataclass(frozen=True)
class ScheduledEvent:
    """A blackboard write applied between ticks once the clock reaches `at`."""

    at: float
    key: str
    value: TypedValue


@dataclass
class Scenario:
    name: str = ""
    protocol: str | None = None  # corpus protocol name…
    tree_text: str | None = None  # …or inline tree text (exactly one)
    blackboard: dict[str, TypedValue] = field(default_factory=dict)
    bindings: dict = field(default_factory=dict)
    events: list[ScheduledEvent] = field(default_factory=list)
    seed: int = 0
    budget_ticks: int = TICK_BUDGET_DEFAULT
    budget_time: float | None = None

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)


def _parse_time(raw) -> float:
    return parse_duration(raw).seconds if isinstance(raw, str) else float(raw)


def load_scenario(raw: dict) -> Scenario:
    budget = raw.get("budget", {})
    events = [
        ScheduledEvent(
            at=_parse_time(e["at"]), key=e["key"], value=value_from_json(e["value"])
        )
        for e in raw.get("events", [])
    ]
    return Scenario(
        name=raw.get("name", ""),
        protocol=raw.get("protocol"),
        tree_text=raw.get("tree"),
        blackboard={k: value_from_json(v) for k, v in raw.get("blackboard", {}).items()},
        bindings=raw.get("bindings", {}),
        events=sorted(events, key=lambda e: e.at),
        seed=int(raw.get("seed", 0)),
        budget_ticks=int(budget.get("ticks", TICK_BUDGET_DEFAULT)),
        budget_time=_parse_time(budget["time"]) if "time" in budget else None,
    )


def resolve_tree(scenario: Scenario) -> BehaviorTree:
    if scenario.tree_text and scenario.protocol:
        raise ValueError("scenario names both an inline tree and a protocol")
    if scenario.tree_text:
        from .dsl import parse_tree

        return parse_tree(scenario.tree_text, name=scenario.name)
    if scenario.protocol:
        from .corpus import load_protocol

        return load_protocol(scenario.protocol)
    raise ValueError("scenario needs either an inline tree or a protocol name")


@dataclass
class SimResult:
    status: Status
    ticks: int
    time: float
    trace: ExecutionTrace
    blackboard: dict[str, TypedValue]
    seed: int

    @property
    def succeeded(self) -> bool:
        return self.status is Status.SUCCESS


def run(
    tree: BehaviorTree,
    bindings: LeafBindings,
    blackboard: Blackboard | None = None,
    events: list[ScheduledEvent] | tuple = (),
    seed: int = 0,
    budget_ticks: int = TICK_BUDGET_DEFAULT,
    budget_time: float | None = None,
    trace: ExecutionTrace | None = None,
    state: RuntimeState | None = None,
) -> SimResult:
    engine = Engine(
        tree,
        bindings,
        blackboard=blackboard,
        clock=VirtualClock(),
        trace=trace,
        state=state,
        rng=random.Random(seed),
    )
    queue = sorted(events, key=lambda e: e.at)
    pending = 0  # index of the next unapplied event
    ticks = 0

    while True:
        while pending < len(queue) and queue[pending].at <= engine.clock.now:
            event = queue[pending]
            engine.trace.append_event(
                EVENT_APPLIED, time=engine.clock.now, key=event.key, value=event.value
            )
            engine.blackboard.set(event.key, event.value)
            pending += 1

        status = engine.tick()
        ticks += 1
        if status is not Status.RUNNING:
            return SimResult(
                status=status,
                ticks=ticks,
                time=engine.clock.now,
                trace=engine.trace,
                blackboard=engine.blackboard.snapshot(),
                seed=seed,
            )
        if budget_time is not None and engine.clock.now > budget_time:
            raise BudgetExceededError("time", budget_time, trace=engine.trace)
        if ticks >= budget_ticks:
            raise BudgetExceededError("ticks", budget_ticks, trace=engine.trace)

        if engine.events_this_tick == 0:
            # nothing moved: jump to whatever could change the picture
            wakes = engine.wake_times()
            if pending < len(queue):
                wakes.append(queue[pending].at)
            future = [w for w in wakes if w > engine.clock.now]
            if not future:
                if engine.blocked:
                    names = sorted({name for _, name in engine.blocked})
                    raise PendingExternalError(names, trace=engine.trace)
                raise DeadlockError(
                    "running, but no timer or scheduled event lies ahead",
                    trace=engine.trace,
                )
            target = min(future)
            if budget_time is not None and target > budget_time:
                raise BudgetExceededError("time", budget_time, trace=engine.trace)
            engine.clock.advance_to(target)


def run_scenario(scenario: Scenario, tree: BehaviorTree | None = None) -> SimResult:
    if tree is None:
        tree = resolve_tree(scenario)
    return run(
        tree,
        bindings_from_specs(scenario.bindings),
        blackboard=Blackboard(dict(scenario.blackboard)),
        events=scenario.events,
        seed=scenario.seed,
        budget_ticks=scenario.budget_ticks,
        budget_time=scenario.budget_time,
    )


def estimate_success_probability(
    scenario: Scenario,
    trials: int = 1000,
    base_seed: int = 0,
    tree: BehaviorTree | None = None,
) -> float:
    """Monte Carlo over per-trial seeds base_seed, base_seed+1, …"""
    if trials < 1:
        raise ValueError("need at least one trial")
    if tree is None:
        tree = resolve_tree(scenario)
    successes = 0
    for i in range(trials):
        result = run_scenario(scenario.with_seed(base_seed + i), tree=tree)
        if result.succeeded:
            successes += 1
    return successes / trials
