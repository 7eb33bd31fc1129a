"""Leaf behaviors: what actually happens when the engine ticks an Action or Query.

Behaviors are stateless objects; anything mutable (script cursors, pending
external outcomes) lives in the run's RuntimeState.leaf_memory, so resetting
the state resets the bindings with it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .blackboard import Blackboard
from .clock import VirtualClock
from .errors import ScriptExhaustedError, UnboundLeafError
from .tree import NodeKind, Predicate, Status
from .values import Duration, TypedValue, parse_duration, value_from_json

ZERO = Duration(0)


@dataclass
class LeafContext:
    name: str
    node_id: str
    kind: NodeKind
    blackboard: Blackboard
    clock: VirtualClock
    rng: random.Random
    memory: dict


class LeafBehavior:
    """Base: consumes its duration and applies declared writes on success."""

    def __init__(self, duration: Duration = ZERO, writes: Mapping[str, TypedValue] | None = None):
        self.duration = duration
        self.writes = dict(writes or {})

    def execute(self, ctx: LeafContext) -> Status:
        raise NotImplementedError

    def finish(self, ctx: LeafContext, status: Status, elapsed: Duration | None = None) -> Status:
        ctx.clock.advance(self.duration if elapsed is None else elapsed)
        if status is Status.SUCCESS:
            for key, value in self.writes.items():
                ctx.blackboard.set(key, value)
        return status


class ConstantSuccess(LeafBehavior):
    def execute(self, ctx: LeafContext) -> Status:
        return self.finish(ctx, Status.SUCCESS)


class ConstantFailure(LeafBehavior):
    def execute(self, ctx: LeafContext) -> Status:
        return self.finish(ctx, Status.FAILURE)


class Scripted(LeafBehavior):
    """Fixed outcome list, one entry per attempt; running past the end is an error."""

    def __init__(self, outcomes, duration: Duration = ZERO, writes=None):
        super().__init__(duration, writes)
        self.outcomes = [o if isinstance(o, Status) else Status(o) for o in outcomes]
        for o in self.outcomes:
            if o is Status.RUNNING:
                raise ValueError("scripted outcomes must be success or failure")

    def execute(self, ctx: LeafContext) -> Status:
        cursor = ctx.memory.get("cursor", 0)
        if cursor >= len(self.outcomes):
            raise ScriptExhaustedError(ctx.name, cursor)
        ctx.memory["cursor"] = cursor + 1
        return self.finish(ctx, self.outcomes[cursor])


class Stochastic(LeafBehavior):
    """Succeeds with probability p_success, drawn from the run's seeded RNG."""

    def __init__(self, p_success: float, duration: Duration = ZERO, writes=None):
        super().__init__(duration, writes)
        if not 0.0 <= p_success <= 1.0:
            raise ValueError("p_success must be in [0, 1]")
        self.p_success = p_success

    def execute(self, ctx: LeafContext) -> Status:
        outcome = Status.SUCCESS if ctx.rng.random() < self.p_success else Status.FAILURE
        return self.finish(ctx, outcome)


class External(LeafBehavior):
    """Returns Running until someone submits an outcome (a human, usually)."""

    def execute(self, ctx: LeafContext) -> Status:
        queue = ctx.memory.get("queue")
        if not queue:
            return Status.RUNNING
        entry = queue.pop(0)
        if isinstance(entry, tuple):
            outcome, elapsed = entry
        else:
            outcome, elapsed = entry, None
        return self.finish(ctx, outcome, elapsed)


class PredicateQuery(LeafBehavior):
    """Query leaf that evaluates a blackboard condition, e.g. SpO2 < 93."""

    def __init__(self, condition: Predicate, duration: Duration = ZERO, writes=None):
        super().__init__(duration, writes)
        self.condition = condition

    def execute(self, ctx: LeafContext) -> Status:
        holds = self.condition.evaluate(ctx.blackboard)
        return self.finish(ctx, Status.SUCCESS if holds else Status.FAILURE)


def submit_outcome(state, leaf_name: str, outcome: Status, elapsed: Duration | None = None) -> None:
    """Queue an outcome for an External leaf; consumed on its next tick.

    `elapsed` overrides the leaf's declared duration for this one outcome
    (how long the real-world step actually took).
    """
    if outcome not in (Status.SUCCESS, Status.FAILURE):
        raise ValueError("submitted outcome must be success or failure")
    memory = state.leaf_memory.setdefault(leaf_name, {})
    entry = outcome if elapsed is None else (outcome, elapsed)
    memory.setdefault("queue", []).append(entry)


class LeafBindings:
    """Name -> behavior map with an optional '*' default."""

    def __init__(self, behaviors: Mapping[str, LeafBehavior] | None = None, default: LeafBehavior | None = None):
        self.behaviors = dict(behaviors or {})
        self.default = self.behaviors.pop("*", default)

    def lookup(self, name: str) -> LeafBehavior:
        behavior = self.behaviors.get(name, self.default)
        if behavior is None:
            raise UnboundLeafError(name)
        return behavior

    def covers(self, name: str) -> bool:
        return name in self.behaviors or self.default is not None

    def with_overrides(self, overrides: Mapping[str, LeafBehavior]) -> "LeafBindings":
        merged = dict(self.behaviors)
        merged.update(overrides)
        return LeafBindings(merged, self.default)


_BEHAVIOR_TYPES = ("scripted", "stochastic", "external", "constant_success", "constant_failure", "predicate")


def behavior_from_spec(spec: dict) -> LeafBehavior:
    """Build a behavior from its scenario-file JSON form."""
    kind = spec.get("type")
    duration = spec.get("duration", 0)
    if isinstance(duration, str):
        duration = parse_duration(duration)
    elif not isinstance(duration, Duration):
        duration = Duration(float(duration))
    writes = {k: value_from_json(v) for k, v in spec.get("writes", {}).items()}

    if kind == "scripted":
        return Scripted(spec["outcomes"], duration, writes)
    if kind == "stochastic":
        return Stochastic(float(spec["p"]), duration, writes)
    if kind == "external":
        return External(duration, writes)
    if kind == "constant_success":
        return ConstantSuccess(duration, writes)
    if kind == "constant_failure":
        return ConstantFailure(duration, writes)
    if kind == "predicate":
        from .dsl import parse_predicate

        return PredicateQuery(parse_predicate(spec["condition"]), duration, writes)
    raise ValueError(f"unknown binding type {kind!r}; expected one of {_BEHAVIOR_TYPES}")


def bindings_from_specs(specs: Mapping[str, dict]) -> LeafBindings:
    behaviors = {}
    default = None
    for name, spec in specs.items():
        behavior = behavior_from_spec(spec) if isinstance(spec, dict) else spec
        if name == "*":
            default = behavior
        else:
            behaviors[name] = behavior
    return LeafBindings(behaviors, default)
