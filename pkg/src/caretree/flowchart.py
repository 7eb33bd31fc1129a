"""Flowcharts: parsing, execution, and compilation to behavior trees.

A chart is a start node, process boxes (do an action, move on), decision
diamonds (branch on a yes/no answer), and end nodes (overall success or
failure). Compilation turns each decision into

    Selector(Sequence(Query(decision), <true branch>), <false branch>)

with both branches cut off at the decision's immediate postdominator — the
first node every path through the decision reaches again — so straight-line
suffixes are emitted once, after the selector.

The selector template has one blind spot: if the true branch can fail, the
selector falls through and runs the false branch, which is not what the chart
says. Such charts are rejected rather than silently mistranslated; failure
ends belong on false branches or the top-level chain.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .dsl import _NAME, parse_predicate
from .engine import Engine
from .errors import ConversionError, MissingOutcomeError
from .tree import BehaviorTree, NodeKind, NodeSpec, Status, build_tree
from .trace import NODE_ENTERED
from .bindings import ConstantFailure, ConstantSuccess, LeafBindings

PASS_LEAF = "_pass"
FAIL_LEAF = "_fail"
SYNTHETIC_LEAVES = (PASS_LEAF, FAIL_LEAF)

_EXIT = "#exit"


@dataclass(frozen=True)
class FlowNode:
    id: str
    type: str  # start | process | decision | end
    label: str = ""
    action: str | None = None  # process
    condition: str | None = None  # decision
    next: str | None = None  # start, process
    on_true: str | None = None  # decision
    on_false: str | None = None  # decision
    outcome: str | None = None  # end: success | failure

    def successors(self) -> list[str]:
        if self.type in ("start", "process"):
            return [self.next] if self.next else []
        if self.type == "decision":
            return [s for s in (self.on_true, self.on_false) if s]
        return []


@dataclass
class FlowChart:
    name: str
    start: str
    nodes: dict[str, FlowNode] = field(default_factory=dict)

    def node(self, node_id: str) -> FlowNode:
        return self.nodes[node_id]

    def decisions(self) -> list[FlowNode]:
        return [n for n in self.nodes.values() if n.type == "decision"]

    def to_dict(self) -> dict:
        nodes = {}
        for node in self.nodes.values():
            raw: dict = {"type": node.type}
            if node.label:
                raw["label"] = node.label
            if node.action is not None:
                raw["action"] = node.action
            if node.condition is not None:
                raw["condition"] = node.condition
            if node.next is not None:
                raw["next"] = node.next
            if node.on_true is not None:
                raw["true"] = node.on_true
            if node.on_false is not None:
                raw["false"] = node.on_false
            if node.outcome is not None:
                raw["outcome"] = node.outcome
            nodes[node.id] = raw
        return {"name": self.name, "start": self.start, "nodes": nodes}


def parse_flowchart(raw: dict) -> FlowChart:
    nodes = {}
    for nid, body in raw.get("nodes", {}).items():
        nodes[nid] = FlowNode(
            id=nid,
            type=body.get("type", ""),
            label=body.get("label", ""),
            action=body.get("action"),
            condition=body.get("condition"),
            next=body.get("next"),
            on_true=body.get("true"),
            on_false=body.get("false"),
            outcome=body.get("outcome"),
        )
    return FlowChart(name=raw.get("name", ""), start=raw.get("start", ""), nodes=nodes)


def validate_flowchart(chart: FlowChart) -> list[str]:
    problems: list[str] = []
    starts = [n for n in chart.nodes.values() if n.type == "start"]
    if len(starts) != 1:
        problems.append(f"chart needs exactly one start node, found {len(starts)}")
    if chart.start not in chart.nodes:
        problems.append(f"start id {chart.start!r} does not resolve")
        return problems
    if chart.nodes[chart.start].type != "start":
        problems.append(f"start id {chart.start!r} is a {chart.nodes[chart.start].type} node")

    for node in chart.nodes.values():
        if node.type not in ("start", "process", "decision", "end"):
            problems.append(f"{node.id}: unknown node type {node.type!r}")
            continue
        if not _NAME.match(node.id):
            problems.append(f"{node.id}: node ids must be identifiers")
        for succ in node.successors():
            if succ not in chart.nodes:
                problems.append(f"{node.id}: successor {succ!r} does not resolve")
        if node.type in ("start", "process") and not node.next:
            problems.append(f"{node.id}: {node.type} node needs a next node")
        if node.type == "process":
            if not node.action or not _NAME.match(node.action):
                problems.append(f"{node.id}: process needs an identifier action name")
        if node.type == "decision":
            if not node.on_true or not node.on_false:
                problems.append(f"{node.id}: decision needs both true and false branches")
            if not node.condition:
                problems.append(f"{node.id}: decision needs a condition")
            else:
                try:
                    parse_predicate(node.condition)
                except ValueError as exc:
                    problems.append(f"{node.id}: bad condition: {exc}")
        if node.type == "end" and node.outcome not in ("success", "failure"):
            problems.append(f"{node.id}: end outcome must be success or failure")

    # reachability and cycles, in one DFS
    seen: set[str] = set()
    on_path: set[str] = set()

    def visit(nid: str) -> None:
        if nid not in chart.nodes:
            return
        seen.add(nid)
        on_path.add(nid)
        for succ in chart.nodes[nid].successors():
            if succ in on_path:
                problems.append(f"{succ}: chart contains a cycle")
            elif succ not in seen:
                visit(succ)
        on_path.discard(nid)

    visit(chart.start)
    for nid in chart.nodes:
        if nid not in seen:
            problems.append(f"{nid}: not reachable from start")
    if not any(n.type == "end" for n in chart.nodes.values()):
        problems.append("chart has no end node")
    return problems


def ensure_valid_flowchart(chart: FlowChart) -> FlowChart:
    problems = validate_flowchart(chart)
    if problems:
        raise ConversionError("; ".join(problems))
    return chart


# ---------------------------------------------------------------------------
# Direct execution


@dataclass
class FlowRun:
    outcome: Status
    actions: list[str]
    path: list[str]


def execute_flowchart(chart: FlowChart, decisions: dict[str, bool]) -> FlowRun:
    """Walk the chart, answering each decision from `decisions` by node id."""
    ensure_valid_flowchart(chart)
    actions: list[str] = []
    path: list[str] = []
    current = chart.start
    for _ in range(len(chart.nodes) + 1):
        node = chart.node(current)
        path.append(current)
        if node.type == "start":
            current = node.next
        elif node.type == "process":
            actions.append(node.action)
            current = node.next
        elif node.type == "decision":
            if current not in decisions:
                raise MissingOutcomeError(current)
            current = node.on_true if decisions[current] else node.on_false
        else:  # end
            outcome = Status.SUCCESS if node.outcome == "success" else Status.FAILURE
            return FlowRun(outcome=outcome, actions=actions, path=path)
    raise AssertionError("validated chart did not terminate")


# ---------------------------------------------------------------------------
# Compilation


def _postdominators(chart: FlowChart) -> dict[str, set[str]]:
    ids = list(chart.nodes)
    succ = {nid: chart.node(nid).successors() or [_EXIT] for nid in ids}
    pd: dict[str, set[str]] = {_EXIT: {_EXIT}}
    everything = set(ids) | {_EXIT}
    for nid in ids:
        pd[nid] = set(everything)
    changed = True
    while changed:
        changed = False
        for nid in ids:
            common = set.intersection(*(pd[s] for s in succ[nid]))
            new = {nid} | common
            if new != pd[nid]:
                pd[nid] = new
                changed = True
    return pd


def _immediate_postdominator(pd: dict[str, set[str]], nid: str) -> str:
    candidates = pd[nid] - {nid}
    # the nearest postdominator is the one postdominated by all the others,
    # i.e. the one with the largest remaining set
    return max(candidates, key=lambda c: (len(pd[c]), c))


def convert_to_bt(chart: FlowChart, name: str | None = None) -> BehaviorTree:
    """Compile an acyclic chart to a tree with identical runs.

    Raises ConversionError for charts whose failure ends sit on a decision's
    true branch (the selector template cannot preserve their meaning).
    """
    ensure_valid_flowchart(chart)
    pd = _postdominators(chart)

    def segment(entry: str | None, stop: str) -> tuple[list[NodeSpec], bool]:
        """Convert the nodes from entry up to (not including) stop.

        Returns the child specs and whether the segment can fail.
        """
        specs: list[NodeSpec] = []
        may_fail = False
        current = entry
        while current != stop:
            node = chart.node(current)
            if node.type == "process":
                specs.append(NodeSpec(NodeKind.ACTION, name=node.action, label=node.label))
                current = node.next
            elif node.type == "end":
                if node.outcome == "success":
                    # finishing a sequence already means success; the synthetic
                    # leaf is only needed to keep an empty branch well formed
                    if not specs:
                        specs.append(NodeSpec(NodeKind.QUERY, name=PASS_LEAF, label=node.label))
                else:
                    specs.append(NodeSpec(NodeKind.QUERY, name=FAIL_LEAF, label=node.label))
                    may_fail = True
                return specs, may_fail
            elif node.type == "decision":
                join = _immediate_postdominator(pd, node.id)
                true_specs, true_may_fail = segment(node.on_true, join)
                false_specs, false_may_fail = segment(node.on_false, join)
                if true_may_fail:
                    raise ConversionError(
                        f"decision {node.id}: the true branch can reach a failure end "
                        "before rejoining, which a fall-through selector cannot express"
                    )
                check = NodeSpec(
                    NodeKind.QUERY, name=node.id, label=node.label or node.condition
                )
                sel = NodeSpec(
                    NodeKind.SELECTOR,
                    [
                        NodeSpec(NodeKind.SEQUENCE, [check] + _pad(true_specs)),
                        _wrap(_pad(false_specs)),
                    ],
                )
                specs.append(sel)
                may_fail = may_fail or false_may_fail
                current = join
            else:  # a second start node would have failed validation
                current = node.next
        return specs, may_fail

    def _pad(specs: list[NodeSpec]) -> list[NodeSpec]:
        return specs or [NodeSpec(NodeKind.QUERY, name=PASS_LEAF)]

    def _wrap(specs: list[NodeSpec]) -> NodeSpec:
        if len(specs) == 1:
            return specs[0]
        return NodeSpec(NodeKind.SEQUENCE, specs)

    top_specs, _ = segment(chart.start, _EXIT)
    child = _wrap(_pad(top_specs))
    return build_tree(child, name=name if name is not None else chart.name, source="flowchart")


# ---------------------------------------------------------------------------
# Equivalence checking


@dataclass
class EquivalenceReport:
    equivalent: bool
    trials: int
    exhaustive: bool
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def run_tree_on_decisions(tree: BehaviorTree, decisions: dict[str, bool]) -> tuple[Status, list[str]]:
    """Single synchronous pass; actions collected in execution order."""
    behaviors = {
        PASS_LEAF: ConstantSuccess(),
        FAIL_LEAF: ConstantFailure(),
    }
    for leaf in tree.leaves():
        if leaf.name in behaviors:
            continue
        if leaf.kind is NodeKind.QUERY and leaf.name in decisions:
            behaviors[leaf.name] = (
                ConstantSuccess() if decisions[leaf.name] else ConstantFailure()
            )
        else:
            behaviors[leaf.name] = ConstantSuccess()
    engine = Engine(tree, LeafBindings(behaviors))
    status = engine.tick()
    assert status is not Status.RUNNING
    actions = [
        tree.node(e.node_id).name
        for e in engine.trace.of_kind(NODE_ENTERED)
        if tree.node(e.node_id).kind is NodeKind.ACTION
    ]
    return status, actions


def check_equivalence(
    chart: FlowChart,
    tree: BehaviorTree | None = None,
    trials: int = 256,
    seed: int = 0,
) -> EquivalenceReport:
    """Compare chart and tree on shared decision assignments.

    Equivalent means: same overall outcome and the same ordered list of
    actions, for every assignment tried. Assignments are exhaustive when the
    chart has few decisions, random (seeded) otherwise.
    """
    if tree is None:
        tree = convert_to_bt(chart)
    decision_ids = sorted(d.id for d in chart.decisions())

    assignments: list[dict[str, bool]]
    if 2 ** len(decision_ids) <= max(trials, 1):
        assignments = []
        for mask in range(2 ** len(decision_ids)):
            assignments.append(
                {d: bool(mask >> i & 1) for i, d in enumerate(decision_ids)}
            )
        exhaustive = True
    else:
        rng = random.Random(seed)
        assignments = [
            {d: rng.random() < 0.5 for d in decision_ids} for _ in range(trials)
        ]
        exhaustive = False

    for assignment in assignments:
        flow_run = execute_flowchart(chart, assignment)
        tree_status, tree_actions = run_tree_on_decisions(tree, assignment)
        if flow_run.outcome is not tree_status or flow_run.actions != tree_actions:
            return EquivalenceReport(
                equivalent=False,
                trials=len(assignments),
                exhaustive=exhaustive,
                counterexample={
                    "decisions": assignment,
                    "flowchart": {
                        "outcome": flow_run.outcome.value,
                        "actions": flow_run.actions,
                    },
                    "tree": {"outcome": tree_status.value, "actions": tree_actions},
                },
            )
    return EquivalenceReport(equivalent=True, trials=len(assignments), exhaustive=exhaustive)
