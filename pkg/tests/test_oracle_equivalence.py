"""The tick engine must agree with the one-shot recursive evaluation.

Sequence/Selector/Parallel have a direct definitional reading on a fixed
assignment of leaf outcomes; ticking with memory, partial passes, and halts
must land on the same answer.
"""

import random

import pytest

from caretree import (
    Engine,
    LeafBindings,
    Scripted,
    Status,
    UnsupportedNodeError,
    action,
    build_tree,
    evaluate_definitional,
    retry,
)
from caretree.generate import random_outcomes, random_stateless_tree

from conftest import check_nesting, run_with_interruptions


def test_engine_matches_oracle_on_synchronous_runs():
    rng = random.Random(1105)
    for _ in range(300):
        tree = random_stateless_tree(rng)
        outcomes = random_outcomes(tree, rng)
        expected = evaluate_definitional(tree, outcomes)
        # one scripted outcome per leaf: a re-tick would raise exhaustion
        bindings = LeafBindings({n: Scripted([o]) for n, o in outcomes.items()})
        engine = Engine(tree, bindings)
        assert engine.tick() is expected, tree.to_dict()


def test_engine_matches_oracle_under_interruptions():
    rng = random.Random(2218)
    for _ in range(150):
        tree = random_stateless_tree(rng)
        outcomes = random_outcomes(tree, rng)
        expected = evaluate_definitional(tree, outcomes)
        status, engine = run_with_interruptions(tree, outcomes, rng)
        assert status is expected, tree.to_dict()
        assert check_nesting(engine.trace, tree) == set()
        assert engine.state.node_states == {}


def test_oracle_rejects_decorated_nodes():
    tree = build_tree(retry(2, action("a")))
    with pytest.raises(UnsupportedNodeError):
        evaluate_definitional(tree, {"a": Status.SUCCESS})
