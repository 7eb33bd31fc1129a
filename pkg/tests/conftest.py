import random

from caretree import (
    Engine,
    External,
    LeafBindings,
    Scripted,
    Status,
    submit_outcome,
)
from caretree.trace import HALTED, NODE_ENTERED, NODE_RETURNED


def check_nesting(trace, tree):
    """Entered/returned/halted events must respect the tree's containment.

    A node opens only while its parent is open, closes only after all its
    descendants have closed, and a halt closes the whole subtree at once.
    Parallel siblings may overlap, so this is containment, not a stack.
    Returns the set of still-open node ids (non-empty only mid-run).
    """
    parents = tree.parent_map()
    open_nodes = set()
    for event in trace:
        node_id = event.node_id
        if event.kind == NODE_ENTERED:
            assert node_id not in open_nodes, f"{node_id} entered twice"
            parent = parents.get(node_id)
            if parent is not None:
                assert parent in open_nodes, f"{node_id} entered outside its parent"
            open_nodes.add(node_id)
        elif event.kind == NODE_RETURNED:
            assert node_id in open_nodes, f"return from {node_id} while closed"
            assert event.status in (Status.SUCCESS, Status.FAILURE)
            for nid in tree.subtree_ids(node_id):
                assert nid == node_id or nid not in open_nodes, (
                    f"{node_id} returned with descendant {nid} still open"
                )
            open_nodes.discard(node_id)
        elif event.kind == HALTED:
            assert node_id in open_nodes, f"halt of {node_id} while closed"
            for nid in tree.subtree_ids(node_id):
                open_nodes.discard(nid)
    return open_nodes


def run_with_interruptions(tree, outcomes, rng: random.Random, max_rounds=500):
    """Drive a tree to completion, answering blocked external leaves from `outcomes`.

    Each leaf is randomly bound either scripted or external; either way it
    reports the outcome fixed for its name, so the result is comparable with
    the memoryless evaluation of the same assignment.
    """
    behaviors = {}
    for name in set(tree.leaf_names()):
        if rng.random() < 0.5:
            behaviors[name] = Scripted([outcomes[name]])
        else:
            behaviors[name] = External()
    engine = Engine(tree, LeafBindings(behaviors))
    for _ in range(max_rounds):
        status = engine.tick()
        if status is not Status.RUNNING:
            return status, engine
        assert engine.blocked, "running with no blocked leaf and no timer"
        for _, leaf_name in engine.blocked:
            submit_outcome(engine.state, leaf_name, outcomes[leaf_name])
    raise AssertionError("run did not settle")
