"""Deterministic tick engine.

One tick walks the tree from the root. Composites remember where they left
off between ticks (the "with memory" variants), and a node's bookkeeping is
discarded the moment it returns Success or Failure, so the next pass starts
fresh. Every entered/returned edge, blackboard write, and halt lands in the
trace.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .bindings import LeafBindings, LeafContext
from .blackboard import Blackboard
from .clock import VirtualClock
from .errors import TypeMismatchError
from .trace import BLACKBOARD_WRITE, HALTED, NODE_ENTERED, NODE_RETURNED, ExecutionTrace
from .tree import (
    BehaviorTree,
    Node,
    NodeKind,
    PeriodicTimer,
    RepeatUntil,
    RetryLimit,
    Status,
    ensure_valid,
)
from .values import Duration, value_kind

REPEAT_CAP_DEFAULT = 10_000


@dataclass
class NodeState:
    """Per-node bookkeeping for the pass currently in flight."""

    in_pass: bool = False
    resume: int = 0
    attempts: int = 0
    iterations: int = 0
    next_fire: float | None = None
    firing: bool = False
    phase: str = "main"
    in_attempt: bool = False
    child_status: dict[int, Status] = field(default_factory=dict)


class RuntimeState:
    """Everything mutable about a run, separate from the immutable tree."""

    def __init__(self):
        self.node_states: dict[str, NodeState] = {}
        self.leaf_memory: dict[str, dict] = {}
        self.last_status: dict[str, Status] = {}

    def reset(self) -> None:
        self.node_states.clear()
        self.leaf_memory.clear()
        self.last_status.clear()


class Engine:
    """Ticks a validated tree against leaf bindings, a blackboard, and a clock."""

    def __init__(
        self,
        tree: BehaviorTree,
        bindings: LeafBindings,
        blackboard: Blackboard | None = None,
        clock: VirtualClock | None = None,
        trace: ExecutionTrace | None = None,
        state: RuntimeState | None = None,
        rng: random.Random | None = None,
        repeat_cap: int = REPEAT_CAP_DEFAULT,
    ):
        ensure_valid(tree)
        self.tree = tree
        self.bindings = bindings
        for name in set(tree.leaf_names()):
            bindings.lookup(name)  # fail fast on unbound leaves
        self.blackboard = blackboard if blackboard is not None else Blackboard()
        if self.blackboard.on_write is None:
            self.blackboard.on_write = self._record_write
        self.clock = clock if clock is not None else VirtualClock()
        self.trace = trace if trace is not None else ExecutionTrace()
        self.state = state if state is not None else RuntimeState()
        self.rng = rng if rng is not None else random.Random(0)
        self.repeat_cap = repeat_cap
        self.blocked: list[tuple[str, str]] = []
        self.events_this_tick = 0

    # -- public surface ----------------------------------------------------

    def tick(self) -> Status:
        self.blocked = []
        self.events_this_tick = 0
        return self._tick_node(self.tree.root_id)

    def reset(self) -> None:
        self.state.reset()

    def wake_times(self) -> list[float]:
        """Times at which waiting timers become due, in no particular order."""
        return [
            st.next_fire
            for st in self.state.node_states.values()
            if st.next_fire is not None and not st.firing
        ]

    def last_status(self, node_id: str) -> Status | None:
        return self.state.last_status.get(node_id)

    # -- trace plumbing ----------------------------------------------------

    def _emit(self, kind: str, **kw) -> None:
        self.events_this_tick += 1
        self.trace.append_event(kind, time=self.clock.now, **kw)

    def _record_write(self, key: str, value) -> None:
        self._emit(BLACKBOARD_WRITE, key=key, value=value)

    def _enter(self, node_id: str) -> None:
        self._emit(NODE_ENTERED, node_id=node_id)

    def _complete(self, node_id: str, status: Status) -> Status:
        self.state.node_states.pop(node_id, None)
        self.state.last_status[node_id] = status
        self._emit(NODE_RETURNED, node_id=node_id, status=status)
        return status

    def _st(self, node_id: str) -> NodeState:
        st = self.state.node_states.get(node_id)
        if st is None:
            st = NodeState()
            self.state.node_states[node_id] = st
        return st

    def _begin_pass(self, node_id: str) -> NodeState:
        st = self._st(node_id)
        if not st.in_pass:
            st.in_pass = True
            self._enter(node_id)
        return st

    def _halt_subtree(self, node_id: str) -> None:
        """Abandon an in-flight subtree: drop its bookkeeping, note the halt."""
        had_state = False
        for nid in self.tree.subtree_ids(node_id):
            if self.state.node_states.pop(nid, None) is not None:
                had_state = True
        if had_state:
            self._emit(HALTED, node_id=node_id)

    # -- node semantics ----------------------------------------------------

    def _tick_node(self, node_id: str) -> Status:
        node = self.tree.node(node_id)
        kind = node.kind
        if kind is NodeKind.ROOT:
            return self._tick_root(node)
        if kind is NodeKind.SEQUENCE:
            return self._tick_sequence(node)
        if kind is NodeKind.SELECTOR:
            return self._tick_selector(node)
        if kind is NodeKind.PARALLEL:
            return self._tick_parallel(node)
        if kind is NodeKind.DECORATOR:
            return self._tick_decorator(node)
        if kind is NodeKind.RECOVERY:
            return self._tick_recovery(node)
        return self._tick_leaf(node)

    def _tick_root(self, node: Node) -> Status:
        self._begin_pass(node.id)
        status = self._tick_node(node.children[0])
        if status is Status.RUNNING:
            return status
        return self._complete(node.id, status)

    def _tick_sequence(self, node: Node) -> Status:
        st = self._begin_pass(node.id)
        while st.resume < len(node.children):
            status = self._tick_node(node.children[st.resume])
            if status is Status.RUNNING:
                return status
            if status is Status.FAILURE:
                return self._complete(node.id, Status.FAILURE)
            st.resume += 1
        return self._complete(node.id, Status.SUCCESS)

    def _tick_selector(self, node: Node) -> Status:
        st = self._begin_pass(node.id)
        while st.resume < len(node.children):
            status = self._tick_node(node.children[st.resume])
            if status is Status.RUNNING:
                return status
            if status is Status.SUCCESS:
                return self._complete(node.id, Status.SUCCESS)
            st.resume += 1
        return self._complete(node.id, Status.FAILURE)

    def _tick_parallel(self, node: Node) -> Status:
        st = self._begin_pass(node.id)
        total = len(node.children)
        threshold = node.threshold
        decision: Status | None = None
        for idx, child_id in enumerate(node.children):
            if idx in st.child_status:
                continue
            status = self._tick_node(child_id)
            if status is Status.RUNNING:
                continue
            st.child_status[idx] = status
            successes = sum(1 for s in st.child_status.values() if s is Status.SUCCESS)
            failures = len(st.child_status) - successes
            # decide as soon as the threshold is met or can no longer be met
            if successes >= threshold:
                decision = Status.SUCCESS
            elif failures > total - threshold:
                decision = Status.FAILURE
            if decision is not None:
                break
        if decision is None:
            return Status.RUNNING
        # reverse order keeps halted events nested inside the parallel's pass
        for idx in range(total - 1, -1, -1):
            if idx not in st.child_status:
                self._halt_subtree(node.children[idx])
        return self._complete(node.id, decision)

    def _tick_decorator(self, node: Node) -> Status:
        policy = node.policy
        if isinstance(policy, RetryLimit):
            return self._tick_retry(node, policy)
        if isinstance(policy, RepeatUntil):
            return self._tick_repeat_until(node, policy)
        assert isinstance(policy, PeriodicTimer)
        return self._tick_timer(node, policy)

    def _tick_retry(self, node: Node, policy: RetryLimit) -> Status:
        st = self._begin_pass(node.id)
        status = self._tick_node(node.children[0])
        if status is Status.RUNNING:
            return status
        if status is Status.SUCCESS:
            return self._complete(node.id, Status.SUCCESS)
        st.attempts += 1
        if st.attempts >= policy.max_attempts:
            return self._complete(node.id, Status.FAILURE)
        return Status.RUNNING

    def _tick_repeat_until(self, node: Node, policy: RepeatUntil) -> Status:
        st = self._begin_pass(node.id)
        if policy.condition.evaluate(self.blackboard):
            self._halt_subtree(node.children[0])
            return self._complete(node.id, Status.SUCCESS)
        status = self._tick_node(node.children[0])
        if status is Status.RUNNING:
            return status
        st.iterations += 1
        if st.iterations >= self.repeat_cap:
            return self._complete(node.id, Status.FAILURE)
        return Status.RUNNING

    def _read_period(self, node: Node) -> float:
        key = node.policy.period_key
        value = self.blackboard.get(key)
        if not isinstance(value, Duration):
            raise TypeMismatchError(
                f"timer period key {key!r} must hold a duration, found {value_kind(value)}"
            )
        return value.seconds

    def _tick_timer(self, node: Node, policy: PeriodicTimer) -> Status:
        st = self._begin_pass(node.id)
        if st.next_fire is None:
            st.next_fire = self.clock.now + self._read_period(node)
        if not st.firing:
            if self.clock.now < st.next_fire:
                return Status.RUNNING
            st.firing = True
        status = self._tick_node(node.children[0])
        if status is Status.RUNNING:
            return status
        if status is Status.SUCCESS:
            return self._complete(node.id, Status.SUCCESS)
        # child failed: wait out another period (re-read, it may have changed)
        st.firing = False
        st.next_fire = self.clock.now + self._read_period(node)
        return Status.RUNNING

    def _tick_recovery(self, node: Node) -> Status:
        st = self._begin_pass(node.id)
        main_id, recovery_id = node.children
        if st.phase == "main":
            status = self._tick_node(main_id)
            if status is Status.RUNNING:
                return status
            if status is Status.SUCCESS:
                return self._complete(node.id, Status.SUCCESS)
            st.phase = "recovering"
        if st.phase == "recovering":
            status = self._tick_node(recovery_id)
            if status is Status.RUNNING:
                return status
            if status is Status.FAILURE:
                return self._complete(node.id, Status.FAILURE)
            st.phase = "retry"
        status = self._tick_node(main_id)
        if status is Status.RUNNING:
            return status
        return self._complete(node.id, status)

    def _tick_leaf(self, node: Node) -> Status:
        st = self._st(node.id)
        if not st.in_attempt:
            st.in_attempt = True
            self._enter(node.id)
        behavior = self.bindings.lookup(node.name)
        memory = self.state.leaf_memory.setdefault(node.name, {})
        ctx = LeafContext(
            name=node.name,
            node_id=node.id,
            kind=node.kind,
            blackboard=self.blackboard,
            clock=self.clock,
            rng=self.rng,
            memory=memory,
        )
        outcome = behavior.execute(ctx)
        if outcome is Status.RUNNING:
            self.blocked.append((node.id, node.name))
            return Status.RUNNING
        return self._complete(node.id, outcome)
