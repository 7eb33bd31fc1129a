"""Bundled protocol library: transcribed trees, their scenarios, and the checks they must satisfy.

Each protocol ships as a canonical `.bt` file plus scenario JSON files, all
listed in `data/index.json` together with the names of the structural
assertions the tree is expected to satisfy. `load_corpus()` re-verifies
everything on load, so a corrupted or drifted data file fails fast rather
than feeding a subtly wrong tree to a caller.

Labels in the `.bt` files quote their published source where the wording is
known; reconstructed steps carry an `(approx)` marker in the label.

Set `BT_CORPUS_DIR` to load the same layout from a different directory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..errors import CorpusError
from ..dsl import parse_tree
from ..sim import Scenario, load_scenario
from ..tree import BehaviorTree, Node, NodeKind, PeriodicTimer, validate

_DATA_DIR = Path(__file__).parent / "data"

ENV_CORPUS_DIR = "BT_CORPUS_DIR"


def corpus_dir() -> Path:
    """Directory the corpus is loaded from (honors BT_CORPUS_DIR)."""
    override = os.environ.get(ENV_CORPUS_DIR)
    return Path(override) if override else _DATA_DIR


# --- structural assertions -------------------------------------------------
#
# Each check returns a list of problems (empty = satisfied) so a failing
# corpus load can say exactly what drifted.

def _leaves(tree: BehaviorTree) -> list[Node]:
    return [n for n in tree.nodes.values() if n.kind in (NodeKind.ACTION, NodeKind.QUERY)]


def _root_child(tree: BehaviorTree) -> Node:
    return tree.node(tree.node(tree.root_id).children[0])


def _subtree_text(tree: BehaviorTree, node_id: str) -> str:
    parts = []
    for nid in tree.subtree_ids(node_id):
        node = tree.node(nid)
        parts.append(node.label)
        if node.name:
            parts.append(node.name)
    return " ".join(parts)


def _assert_root_child_is_sequence(tree: BehaviorTree) -> list[str]:
    child = _root_child(tree)
    if child.kind is not NodeKind.SEQUENCE:
        return [f"node under the root is {child.kind.value}, expected sequence"]
    return []


def _assert_exactly_one_selector(tree: BehaviorTree) -> list[str]:
    count = sum(1 for n in tree.nodes.values() if n.kind is NodeKind.SELECTOR)
    if count != 1:
        return [f"expected exactly one selector, found {count}"]
    return []


def _assert_parallel_below_root(tree: BehaviorTree) -> list[str]:
    child = _root_child(tree)
    if child.kind is not NodeKind.PARALLEL:
        return [f"node under the root is {child.kind.value}, expected parallel"]
    return []


def _assert_monitoring_references_spo2_93(tree: BehaviorTree) -> list[str]:
    child = _root_child(tree)
    if child.kind is not NodeKind.PARALLEL or not child.children:
        return ["no parallel monitoring branch to inspect"]
    text = _subtree_text(tree, child.children[0])
    problems = []
    if "SpO2" not in text:
        problems.append("monitoring branch never mentions SpO2")
    if "93" not in text:
        problems.append("monitoring branch never mentions the 93% threshold")
    return problems


def _assert_two_panel_composition(tree: BehaviorTree) -> list[str]:
    child = _root_child(tree)
    if len(child.children) != 2:
        return [f"expected the two published panels as two children, found {len(child.children)}"]
    return []


def _assert_has_recovery_node(tree: BehaviorTree) -> list[str]:
    if any(n.kind is NodeKind.RECOVERY for n in tree.nodes.values()):
        return []
    return ["no recovery node in the tree"]


def _assert_planner_selector_of_four(tree: BehaviorTree) -> list[str]:
    for node in tree.nodes.values():
        if node.kind is not NodeKind.SELECTOR or len(node.children) != 4:
            continue
        if all(tree.node(c).kind is NodeKind.QUERY for c in node.children):
            return []
    return ["no selector over exactly four query leaves (the planner checks)"]


def _assert_has_select_leaf(tree: BehaviorTree) -> list[str]:
    if any(n.label == "Select" for n in _leaves(tree)):
        return []
    return ['no leaf labeled "Select"']


def _assert_leaf_count_47(tree: BehaviorTree) -> list[str]:
    count = len(_leaves(tree))
    if count != 47:
        return [f"expected 47 action/query leaves, found {count}"]
    return []


_SUBTREE_LABELS = ("High Risk", "Low Risk", "High Risk/Symptomatic", "High Risk/Asymptomatic")


def _assert_four_named_subtrees(tree: BehaviorTree) -> list[str]:
    labels = {n.label for n in tree.nodes.values()}
    missing = [label for label in _SUBTREE_LABELS if label not in labels]
    return [f"missing sub-tree labeled {label!r}" for label in missing]


def _assert_periodic_monitoring_tca(tree: BehaviorTree) -> list[str]:
    for node in tree.nodes.values():
        if node.kind is not NodeKind.PARALLEL:
            continue
        for branch in node.children:
            for nid in tree.subtree_ids(branch):
                policy = tree.node(nid).policy
                if isinstance(policy, PeriodicTimer) and policy.period_key == "Tca":
                    return []
    return ["no parallel branch carrying a periodic timer on the Tca key"]


ASSERTIONS: dict[str, Callable[[BehaviorTree], list[str]]] = {
    "root-child-is-sequence": _assert_root_child_is_sequence,
    "exactly-one-selector": _assert_exactly_one_selector,
    "parallel-below-root": _assert_parallel_below_root,
    "monitoring-references-spo2-93": _assert_monitoring_references_spo2_93,
    "two-panel-composition": _assert_two_panel_composition,
    "has-recovery-node": _assert_has_recovery_node,
    "planner-selector-of-four": _assert_planner_selector_of_four,
    "has-select-leaf": _assert_has_select_leaf,
    "leaf-count-47": _assert_leaf_count_47,
    "four-named-subtrees": _assert_four_named_subtrees,
    "periodic-monitoring-tca": _assert_periodic_monitoring_tca,
}


def check_assertions(tree: BehaviorTree, names: tuple[str, ...] | list[str]) -> list[str]:
    """Run named structural checks; unknown names are themselves problems."""
    problems: list[str] = []
    for name in names:
        check = ASSERTIONS.get(name)
        if check is None:
            problems.append(f"unknown assertion {name!r}")
        else:
            problems.extend(check(tree))
    return problems


# --- loading ----------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolEntry:
    """One bundled protocol: where it lives and what must hold for it."""

    name: str
    title: str
    dsl_path: Path
    assertions: tuple[str, ...] = ()
    scenario_paths: tuple[Path, ...] = ()
    notes: str = ""

    def load_tree(self) -> BehaviorTree:
        tree = parse_tree(self.dsl_path.read_text(), name=self.name, source=str(self.dsl_path))
        problems = validate(tree) + check_assertions(tree, self.assertions)
        if problems:
            raise CorpusError(f"protocol {self.name!r}: " + "; ".join(problems))
        return tree

    def load_scenarios(self) -> list[Scenario]:
        return [load_scenario(json.loads(p.read_text())) for p in self.scenario_paths]


def load_index(directory: Path | None = None) -> dict:
    directory = directory or corpus_dir()
    index_path = directory / "index.json"
    if not index_path.exists():
        raise CorpusError(f"no corpus index at {index_path}")
    return json.loads(index_path.read_text())


def load_corpus(directory: Path | None = None) -> list[ProtocolEntry]:
    """All bundled protocols, verified (parse + validate + assertions) on load."""
    directory = directory or corpus_dir()
    entries = []
    for raw in load_index(directory)["protocols"]:
        entry = ProtocolEntry(
            name=raw["name"],
            title=raw.get("title", raw["name"]),
            dsl_path=directory / raw["dsl"],
            assertions=tuple(raw.get("assertions", ())),
            scenario_paths=tuple(directory / s for s in raw.get("scenarios", ())),
            notes=raw.get("notes", ""),
        )
        entry.load_tree()  # verify eagerly so a bad file fails the whole load
        entries.append(entry)
    return entries


def load_protocol(name: str, directory: Path | None = None) -> BehaviorTree:
    """Parse and verify one bundled protocol by its registry name."""
    directory = directory or corpus_dir()
    index = load_index(directory)
    for raw in index["protocols"]:
        if raw["name"] == name:
            entry = ProtocolEntry(
                name=raw["name"],
                title=raw.get("title", raw["name"]),
                dsl_path=directory / raw["dsl"],
                assertions=tuple(raw.get("assertions", ())),
            )
            return entry.load_tree()
    known = ", ".join(raw["name"] for raw in index["protocols"])
    raise CorpusError(f"unknown protocol {name!r} (known: {known})")
