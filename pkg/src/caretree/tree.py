"""Behavior-tree data model, structural validation, and normalization.

A tree is a flat id -> Node map plus a root id, so malformed candidates
(dangling children, cycles, shared nodes) are representable and can be
reported by validate() instead of being unconstructable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterator

from .errors import InvalidTreeError
from .values import Duration, TypedValue, compare_values, format_duration, literal_text


class Status(enum.Enum):
    """Result of ticking a node."""

    SUCCESS = "success"
    FAILURE = "failure"
    RUNNING = "running"

    def __str__(self) -> str:
        return self.value


class NodeKind(enum.Enum):
    ROOT = "root"
    SEQUENCE = "sequence"
    SELECTOR = "selector"
    PARALLEL = "parallel"
    DECORATOR = "decorator"
    RECOVERY = "recovery"
    ACTION = "action"
    QUERY = "query"

    def __str__(self) -> str:
        return self.value


COMPOSITE_KINDS = frozenset({NodeKind.SEQUENCE, NodeKind.SELECTOR, NodeKind.PARALLEL})
LEAF_KINDS = frozenset({NodeKind.ACTION, NodeKind.QUERY})

COMPARISON_OPS = ("<=", ">=", "==", "!=", "<", ">")


@dataclass(frozen=True)
class Predicate:
    """Comparison of one blackboard key against a literal, e.g. SpO2 < 93."""

    key: str
    op: str
    value: TypedValue

    def __post_init__(self):
        if self.op not in COMPARISON_OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")

    def __str__(self) -> str:
        return f"{self.key} {self.op} {literal_text(self.value)}"

    def evaluate(self, blackboard) -> bool:
        return compare_values(self.op, blackboard.get(self.key), self.value)


@dataclass(frozen=True)
class RepeatUntil:
    """Re-run the child until the condition holds on the blackboard."""

    condition: Predicate


@dataclass(frozen=True)
class RetryLimit:
    """Re-run the child on failure, up to max_attempts attempts."""

    max_attempts: int


@dataclass(frozen=True)
class PeriodicTimer:
    """Run the child once per period; the period is read from the blackboard."""

    period_key: str


DecoratorPolicy = RepeatUntil | RetryLimit | PeriodicTimer


@dataclass
class Node:
    id: str
    kind: NodeKind
    label: str = ""
    children: list[str] = field(default_factory=list)
    name: str | None = None  # Action/Query leaf identifier
    threshold: int | None = None  # Parallel success count
    policy: DecoratorPolicy | None = None
    explicit_id: bool = False  # id came from the author; the serializer writes it back

    @property
    def is_leaf(self) -> bool:
        return self.kind in LEAF_KINDS


@dataclass
class BehaviorTree:
    nodes: dict[str, Node]
    root_id: str
    name: str = ""
    version: str = ""
    source: str = ""

    def node(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def root(self) -> Node:
        return self.nodes[self.root_id]

    def children(self, node: Node | str) -> list[Node]:
        if isinstance(node, str):
            node = self.nodes[node]
        return [self.nodes[c] for c in node.children]

    def iter_preorder(self) -> Iterator[Node]:
        """Depth-first, children in order; skips unresolvable ids and repeats."""
        seen = set()
        stack = [self.root_id]
        while stack:
            nid = stack.pop()
            if nid in seen or nid not in self.nodes:
                continue
            seen.add(nid)
            node = self.nodes[nid]
            yield node
            stack.extend(reversed(node.children))

    def leaves(self) -> list[Node]:
        return [n for n in self.iter_preorder() if n.is_leaf]

    def leaf_names(self) -> list[str]:
        return [n.name for n in self.leaves()]

    def parent_map(self) -> dict[str, str]:
        parents = {}
        for node in self.nodes.values():
            for child in node.children:
                parents[child] = node.id
        return parents

    def subtree_ids(self, node_id: str) -> list[str]:
        out = []
        stack = [node_id]
        while stack:
            nid = stack.pop()
            if nid not in self.nodes:
                continue
            out.append(nid)
            stack.extend(reversed(self.nodes[nid].children))
        return out

    def to_dict(self) -> dict:
        return {
            "rootId": self.root_id,
            "name": self.name,
            "version": self.version,
            "source": self.source,
            "nodes": {nid: _node_to_dict(n) for nid, n in self.nodes.items()},
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "BehaviorTree":
        return cls(
            nodes={nid: _node_from_dict(n) for nid, n in raw["nodes"].items()},
            root_id=raw["rootId"],
            name=raw.get("name", ""),
            version=raw.get("version", ""),
            source=raw.get("source", ""),
        )


def _policy_to_dict(policy: DecoratorPolicy) -> dict:
    if isinstance(policy, RetryLimit):
        return {"type": "retry", "maxAttempts": policy.max_attempts}
    if isinstance(policy, RepeatUntil):
        p = policy.condition
        from .values import value_to_json

        return {
            "type": "repeat_until",
            "condition": {"key": p.key, "op": p.op, "value": value_to_json(p.value)},
        }
    if isinstance(policy, PeriodicTimer):
        return {"type": "timer", "periodKey": policy.period_key}
    raise TypeError(f"unknown policy {policy!r}")


def _node_to_dict(node: Node) -> dict:
    out = {"id": node.id, "kind": node.kind.value, "label": node.label, "children": list(node.children)}
    if node.name is not None:
        out["name"] = node.name
    if node.threshold is not None:
        out["threshold"] = node.threshold
    if node.policy is not None:
        out["policy"] = _policy_to_dict(node.policy)
    return out


def _policy_from_dict(raw: dict) -> DecoratorPolicy:
    from .values import value_from_json

    kind = raw["type"]
    if kind == "retry":
        return RetryLimit(int(raw["maxAttempts"]))
    if kind == "repeat_until":
        cond = raw["condition"]
        return RepeatUntil(Predicate(cond["key"], cond["op"], value_from_json(cond["value"])))
    if kind == "timer":
        return PeriodicTimer(raw["periodKey"])
    raise ValueError(f"unknown policy type {kind!r}")


def _node_from_dict(raw: dict) -> Node:
    return Node(
        id=raw["id"],
        kind=NodeKind(raw["kind"]),
        label=raw.get("label", ""),
        children=list(raw.get("children", [])),
        name=raw.get("name"),
        threshold=raw.get("threshold"),
        policy=_policy_from_dict(raw["policy"]) if raw.get("policy") else None,
    )


@dataclass(frozen=True)
class StructuralViolation:
    node_id: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.node_id}: {self.message}"


def validate(tree: BehaviorTree) -> list[StructuralViolation]:
    """Check every structural invariant; an empty list means the tree is well formed."""
    out: list[StructuralViolation] = []

    if tree.root_id not in tree.nodes:
        out.append(StructuralViolation(tree.root_id, "root-missing", "root id does not resolve"))
        return out
    root = tree.nodes[tree.root_id]
    if root.kind is not NodeKind.ROOT:
        out.append(
            StructuralViolation(root.id, "root-kind", f"root node has kind {root.kind}, expected root")
        )

    parents: dict[str, list[str]] = {}
    for node in tree.nodes.values():
        seen_children = set()
        for child in node.children:
            if child not in tree.nodes:
                out.append(
                    StructuralViolation(node.id, "unknown-child", f"child id {child!r} does not resolve")
                )
                continue
            if child in seen_children:
                out.append(
                    StructuralViolation(node.id, "duplicate-child", f"child id {child!r} listed twice")
                )
            seen_children.add(child)
            parents.setdefault(child, []).append(node.id)

        kind = node.kind
        if kind is NodeKind.ROOT:
            if node.id != tree.root_id:
                out.append(StructuralViolation(node.id, "stray-root", "root-kind node that is not the tree root"))
            if len(node.children) != 1:
                out.append(
                    StructuralViolation(node.id, "root-single-child", "root must have exactly one child")
                )
        elif kind in COMPOSITE_KINDS:
            if len(node.children) < 1:
                out.append(
                    StructuralViolation(node.id, "composite-children", f"{kind} must have at least one child")
                )
            if kind is NodeKind.PARALLEL:
                t = node.threshold
                if t is None or t < 1:
                    out.append(
                        StructuralViolation(node.id, "parallel-threshold", "threshold must be at least 1")
                    )
                elif node.children and t > len(node.children):
                    out.append(
                        StructuralViolation(node.id, "parallel-threshold", "threshold exceeds child count")
                    )
        elif kind is NodeKind.DECORATOR:
            if len(node.children) != 1:
                out.append(
                    StructuralViolation(node.id, "decorator-single-child", "decorator must have exactly one child")
                )
            if node.policy is None:
                out.append(StructuralViolation(node.id, "decorator-policy", "decorator carries no policy"))
            elif isinstance(node.policy, RetryLimit) and node.policy.max_attempts < 1:
                out.append(
                    StructuralViolation(node.id, "retry-limit", "retry limit must be at least 1")
                )
        elif kind is NodeKind.RECOVERY:
            if len(node.children) != 2:
                out.append(
                    StructuralViolation(
                        node.id, "recovery-two-children", "recovery must have exactly two children (main, recovery)"
                    )
                )
        elif kind in LEAF_KINDS:
            if node.children:
                out.append(StructuralViolation(node.id, "leaf-no-children", f"{kind} leaf cannot have children"))
            if not node.name:
                out.append(StructuralViolation(node.id, "leaf-name", f"{kind} leaf needs a nonempty name"))

    for child, ps in parents.items():
        if len(ps) > 1:
            out.append(
                StructuralViolation(child, "multiple-parents", f"node referenced by {len(ps)} parents: {ps}")
            )
    if tree.root_id in parents:
        out.append(StructuralViolation(tree.root_id, "root-parent", "root must not be anyone's child"))

    # Cycle check: DFS with an explicit path set.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {nid: WHITE for nid in tree.nodes}

    def visit(nid: str) -> None:
        color[nid] = GRAY
        for child in tree.nodes[nid].children:
            if child not in tree.nodes:
                continue
            if color[child] == GRAY:
                out.append(StructuralViolation(child, "cycle", "child relation contains a cycle"))
            elif color[child] == WHITE:
                visit(child)
        color[nid] = BLACK

    visit(tree.root_id)

    reachable = {nid for nid, c in color.items() if c == BLACK}
    for nid in tree.nodes:
        if nid not in reachable:
            out.append(StructuralViolation(nid, "unreachable", "node not reachable from root"))

    return out


def ensure_valid(tree: BehaviorTree) -> BehaviorTree:
    violations = validate(tree)
    if violations:
        raise InvalidTreeError(violations)
    return tree


def normalize(tree: BehaviorTree) -> BehaviorTree:
    """Splice same-kind Sequence/Selector nesting into the parent, preserving order.

    The result is semantically equivalent: a Sequence succeeds iff all children
    succeed in order, so Sequence(A, Sequence(B, C), D) and Sequence(A, B, C, D)
    fail and succeed identically (likewise Selector).
    """
    ensure_valid(tree)
    nodes: dict[str, Node] = {}

    def rebuild(nid: str) -> str:
        node = tree.nodes[nid]
        kids = [rebuild(c) for c in node.children]
        if node.kind in (NodeKind.SEQUENCE, NodeKind.SELECTOR):
            flat: list[str] = []
            for kid in kids:
                child = nodes[kid]
                if child.kind is node.kind:
                    flat.extend(child.children)
                    del nodes[kid]
                else:
                    flat.append(kid)
            kids = flat
        nodes[nid] = replace(node, children=kids)
        return nid

    root = rebuild(tree.root_id)
    return BehaviorTree(nodes=nodes, root_id=root, name=tree.name, version=tree.version, source=tree.source)


def structural_equal(a: BehaviorTree, b: BehaviorTree) -> bool:
    """Same kinds, labels, parameters, and child order; node ids are ignored."""

    def eq(na: Node, nb: Node) -> bool:
        if na.kind is not nb.kind or na.label != nb.label:
            return False
        if (na.name, na.threshold, na.policy) != (nb.name, nb.threshold, nb.policy):
            return False
        if len(na.children) != len(nb.children):
            return False
        return all(eq(a.nodes[x], b.nodes[y]) for x, y in zip(na.children, nb.children))

    return eq(a.nodes[a.root_id], b.nodes[b.root_id])


# ---------------------------------------------------------------------------
# Programmatic construction.  Builders produce nested NodeSpec values;
# build_tree() flattens them into a BehaviorTree with preorder ids n1, n2, ...


@dataclass
class NodeSpec:
    kind: NodeKind
    children: list["NodeSpec"] = field(default_factory=list)
    label: str = ""
    name: str | None = None
    threshold: int | None = None
    policy: DecoratorPolicy | None = None
    id: str | None = None


def sequence(*children: NodeSpec, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.SEQUENCE, list(children), label=label, id=id)


def selector(*children: NodeSpec, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.SELECTOR, list(children), label=label, id=id)


def parallel(threshold: int, *children: NodeSpec, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.PARALLEL, list(children), label=label, threshold=threshold, id=id)


def action(name: str, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.ACTION, name=name, label=label, id=id)


def query(name: str, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.QUERY, name=name, label=label, id=id)


def retry(max_attempts: int, child: NodeSpec, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.DECORATOR, [child], label=label, policy=RetryLimit(max_attempts), id=id)


def repeat_until(condition: Predicate, child: NodeSpec, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.DECORATOR, [child], label=label, policy=RepeatUntil(condition), id=id)


def timer(period_key: str, child: NodeSpec, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.DECORATOR, [child], label=label, policy=PeriodicTimer(period_key), id=id)


def recovery(main: NodeSpec, fallback: NodeSpec, label: str = "", id: str | None = None) -> NodeSpec:
    return NodeSpec(NodeKind.RECOVERY, [main, fallback], label=label, id=id)


def build_tree(
    child: NodeSpec,
    name: str = "",
    version: str = "",
    source: str = "",
    root_label: str = "",
    root_id: str | None = None,
) -> BehaviorTree:
    """Wrap a spec in a Root node and assign preorder ids."""
    nodes: dict[str, Node] = {}
    counter = [0]

    def alloc(spec_id: str | None) -> tuple[str, bool]:
        counter[0] += 1
        if spec_id is not None:
            return spec_id, True
        return f"n{counter[0]}", False

    def build(spec: NodeSpec) -> str:
        nid, explicit = alloc(spec.id)
        if nid in nodes:
            raise ValueError(f"duplicate node id {nid!r}")
        node = Node(
            id=nid,
            kind=spec.kind,
            label=spec.label,
            name=spec.name,
            threshold=spec.threshold,
            policy=spec.policy,
            explicit_id=explicit,
        )
        nodes[nid] = node
        node.children = [build(c) for c in spec.children]
        return nid

    rid, explicit = alloc(root_id)
    root = Node(id=rid, kind=NodeKind.ROOT, label=root_label, explicit_id=explicit)
    nodes[rid] = root
    root.children = [build(child)]
    return BehaviorTree(nodes=nodes, root_id=rid, name=name, version=version, source=source)
