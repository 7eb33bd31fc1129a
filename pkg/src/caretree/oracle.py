"""Reference evaluator for the stateless node kinds.

Evaluates a tree in one recursive pass given a fixed outcome per leaf name:
Sequence is a short-circuit AND, Selector a short-circuit OR, Parallel counts
successes against its threshold over *all* children. No memory, no partial
passes — which is exactly why it is useful as an independent check on the
tick engine.
"""

from __future__ import annotations

from typing import Mapping

from .errors import UnsupportedNodeError
from .tree import BehaviorTree, NodeKind, Status


def evaluate_definitional(
    tree: BehaviorTree,
    outcomes: Mapping[str, Status],
    node_id: str | None = None,
) -> Status:
    node = tree.node(node_id if node_id is not None else tree.root_id)

    if node.kind is NodeKind.ROOT:
        return evaluate_definitional(tree, outcomes, node.children[0])

    if node.kind is NodeKind.SEQUENCE:
        for child in node.children:
            if evaluate_definitional(tree, outcomes, child) is Status.FAILURE:
                return Status.FAILURE
        return Status.SUCCESS

    if node.kind is NodeKind.SELECTOR:
        for child in node.children:
            if evaluate_definitional(tree, outcomes, child) is Status.SUCCESS:
                return Status.SUCCESS
        return Status.FAILURE

    if node.kind is NodeKind.PARALLEL:
        successes = sum(
            1
            for child in node.children
            if evaluate_definitional(tree, outcomes, child) is Status.SUCCESS
        )
        return Status.SUCCESS if successes >= node.threshold else Status.FAILURE

    if node.kind in (NodeKind.ACTION, NodeKind.QUERY):
        outcome = outcomes[node.name]
        if outcome not in (Status.SUCCESS, Status.FAILURE):
            raise ValueError(f"leaf {node.name!r} needs a success/failure outcome")
        return outcome

    raise UnsupportedNodeError(
        f"definitional evaluation does not cover {node.kind.value} nodes"
    )
