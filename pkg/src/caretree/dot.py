"""Graphviz DOT rendering of a tree, optionally colored by latest statuses."""

from __future__ import annotations

from .tree import BehaviorTree, Node, NodeKind, PeriodicTimer, RepeatUntil, RetryLimit, Status

_GLYPHS = {
    NodeKind.SEQUENCE: "→",  # ->
    NodeKind.SELECTOR: "?",
    NodeKind.RECOVERY: "⟲",  # recovery loop
}

_STATUS_FILL = {
    Status.SUCCESS: "#a6d96a",
    Status.FAILURE: "#f46d43",
    Status.RUNNING: "#fee08b",
}


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _node_label(node: Node) -> str:
    kind = node.kind
    if kind is NodeKind.ROOT:
        return node.label or "root"
    if kind in (NodeKind.SEQUENCE, NodeKind.SELECTOR, NodeKind.RECOVERY):
        glyph = _GLYPHS[kind]
        return f"{glyph}\\n{_escape(node.label)}" if node.label else glyph
    if kind is NodeKind.PARALLEL:
        head = f"⇉ {node.threshold}/{len(node.children)}"
        return f"{head}\\n{_escape(node.label)}" if node.label else head
    if kind is NodeKind.DECORATOR:
        policy = node.policy
        if isinstance(policy, RetryLimit):
            head = f"retry {policy.max_attempts}"
        elif isinstance(policy, RepeatUntil):
            head = f"until {policy.condition}"
        else:
            assert isinstance(policy, PeriodicTimer)
            head = f"every {policy.period_key}"
        return f"{_escape(head)}\\n{_escape(node.label)}" if node.label else _escape(head)
    # leaves show their label when present, falling back to the bound name
    text = node.label or node.name or ""
    return _escape(text)


def _shape(node: Node) -> str:
    kind = node.kind
    if kind is NodeKind.ROOT:
        return "circle"
    if kind is NodeKind.ACTION:
        return "ellipse"
    if kind is NodeKind.QUERY:
        return "diamond"
    return "box"


def export_dot(
    tree: BehaviorTree,
    statuses: dict[str, Status] | None = None,
    title: str | None = None,
) -> str:
    """Render the tree as a DOT digraph; statuses map node ids to fill colors."""
    statuses = statuses or {}
    name = _escape(title or tree.name or "behavior_tree")
    out = [f'digraph "{name}" {{']
    out.append("  ordering=out;")
    out.append('  node [fontname="Helvetica", fontsize=11];')
    for node in tree.iter_preorder():
        attrs = [f'label="{_node_label(node)}"', f"shape={_shape(node)}"]
        if node.kind is NodeKind.ROOT:
            attrs.append("width=0.4")
        status = statuses.get(node.id)
        if status is not None:
            attrs.append('style="filled"')
            attrs.append(f'fillcolor="{_STATUS_FILL[status]}"')
        out.append(f'  "{_escape(node.id)}" [{", ".join(attrs)}];')
    for node in tree.iter_preorder():
        for child in node.children:
            out.append(f'  "{_escape(node.id)}" -> "{_escape(child)}";')
    out.append("}")
    return "\n".join(out) + "\n"
