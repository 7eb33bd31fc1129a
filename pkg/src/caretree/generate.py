"""Random generators for property-style tests and equivalence sweeps."""

from __future__ import annotations

import itertools
import random

from .flowchart import FlowChart, FlowNode
from .tree import BehaviorTree, NodeSpec, Status, action, build_tree, parallel, query, selector, sequence


def random_stateless_tree(
    rng: random.Random,
    max_depth: int = 4,
    max_children: int = 4,
) -> BehaviorTree:
    """A tree using only Sequence/Selector/Parallel and uniquely named leaves."""
    counter = itertools.count(1)

    def grow(depth: int) -> NodeSpec:
        if depth >= max_depth or (depth > 0 and rng.random() < 0.35):
            name = f"leaf_{next(counter)}"
            return action(name) if rng.random() < 0.7 else query(name)
        arity = rng.randint(2, max_children)
        children = [grow(depth + 1) for _ in range(arity)]
        pick = rng.random()
        if pick < 0.4:
            return sequence(*children)
        if pick < 0.8:
            return selector(*children)
        return parallel(rng.randint(1, arity), *children)

    return build_tree(grow(0), name="generated")


def random_outcomes(tree: BehaviorTree, rng: random.Random) -> dict[str, Status]:
    """One fixed Success/Failure outcome per leaf name."""
    return {
        name: Status.SUCCESS if rng.random() < 0.5 else Status.FAILURE
        for name in set(tree.leaf_names())
    }


def random_flowchart(rng: random.Random, max_depth: int = 3, name: str = "generated") -> FlowChart:
    """A structured, acyclic chart the selector template can always express.

    Failure ends are only placed where a decision's false branch (or the top
    chain) can absorb them, tracked by `may_fail` as branches nest.
    """
    counter = itertools.count(1)
    nodes: dict[str, FlowNode] = {}
    can_reach_failure: dict[str, bool] = {}

    def fresh(prefix: str) -> str:
        return f"{prefix}{next(counter)}"

    def add(node: FlowNode) -> str:
        nodes[node.id] = node
        return node.id

    def end(outcome: str) -> str:
        eid = add(FlowNode(id=fresh("e"), type="end", outcome=outcome))
        can_reach_failure[eid] = outcome == "failure"
        return eid

    def chain(depth: int, exit_to: str, may_fail: bool) -> str:
        """A run of processes/decisions wired (backwards) toward exit_to."""
        target = exit_to
        for _ in range(rng.randint(1, 3)):
            if depth < max_depth and rng.random() < 0.4:
                target = decision(depth, target, may_fail)
            else:
                pid = fresh("p")
                add(FlowNode(id=pid, type="process", action=f"step_{pid}", next=target))
                can_reach_failure[pid] = can_reach_failure[target]
                target = pid
        return target

    def decision(depth: int, join: str, may_fail: bool) -> str:
        """Branch arms either rejoin at `join` or stop at their own end node.

        An arm that does not rejoin collapses the decision's postdominator
        past `join`, making the *other* arm absorb the downstream suffix, so
        early-ending arms are only generated when that suffix cannot fail.
        Failure ends themselves go on false arms only, and only where an
        enclosing true arm does not forbid them (may_fail).
        """
        did = fresh("d")
        suffix_safe = not can_reach_failure[join]

        roll = rng.random()
        if suffix_safe and roll < 0.25:
            stop = end("success")
            true_entry = chain(depth + 1, stop, False) if rng.random() < 0.5 else stop
        elif roll < 0.5:
            true_entry = join
        else:
            true_entry = chain(depth + 1, join, False)

        roll = rng.random()
        if suffix_safe and may_fail and roll < 0.3:
            stop = end("failure")
            false_entry = chain(depth + 1, stop, may_fail) if rng.random() < 0.5 else stop
        elif suffix_safe and roll < 0.45:
            stop = end("success")
            false_entry = chain(depth + 1, stop, False) if rng.random() < 0.5 else stop
        elif roll < 0.7:
            false_entry = join
        else:
            false_entry = chain(depth + 1, join, may_fail)

        add(
            FlowNode(
                id=did,
                type="decision",
                condition=f"answer_{did} == true",
                on_true=true_entry,
                on_false=false_entry,
            )
        )
        can_reach_failure[did] = (
            can_reach_failure[true_entry] or can_reach_failure[false_entry]
        )
        return did

    entry = chain(0, end("success"), may_fail=True)
    start = add(FlowNode(id=fresh("s"), type="start", next=entry))

    # a decision whose branches both end early leaves its join dangling;
    # drop anything runs can never reach
    reachable: set[str] = set()
    stack = [start]
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        stack.extend(nodes[nid].successors())
    return FlowChart(
        name=name, start=start, nodes={nid: nodes[nid] for nid in reachable}
    )
