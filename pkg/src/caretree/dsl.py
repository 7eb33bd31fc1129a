"""The indented text format for trees, in both directions.

One node per line, two spaces of indent per level, `#` comments. A node line
is `keyword [params] [@id] ["label"]`:

    root "Blood draw"
      sequence
        query patient_ready "Patient ready?"
        retry 3 @attempts "Attempt either arm"
          selector
            action draw_left "Left arm"
            action draw_right "Right arm"

serialize() writes the canonical form of that grammar; parsing its output
gives the original tree back, and canonical files re-serialize byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .tree import (
    BehaviorTree,
    Node,
    NodeKind,
    NodeSpec,
    PeriodicTimer,
    Predicate,
    RepeatUntil,
    RetryLimit,
    ensure_valid,
)
from .values import TypedValue, literal_text, parse_duration

INDENT = "  "

_TOKEN = re.compile(
    r"""
    (?P<quoted> "(?:[^"\\]|\\.)*")
  | (?P<at_id>  @[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<op>     <=|>=|==|!=|<|>)
  | (?P<word>   [^\s"@<>=!]+)
  | (?P<bad>    \S)
""",
    re.VERBOSE,
)

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_DURATION = re.compile(r"^\d+(?:\.\d+)?[smhd]$")
_NUMBER = re.compile(r"^-?\d+(?:\.\d+)?$")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


def _unquote(token: str) -> str:
    return token[1:-1].replace('\\"', '"').replace("\\\\", "\\")


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _strip_comment(line: str) -> str:
    in_quote = False
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == '"' and (i == 0 or line[i - 1] != "\\"):
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
        i += 1
    return line


def parse_literal(token: str) -> TypedValue:
    """DSL literal: true/false, number, duration, or quoted string."""
    if token.startswith('"'):
        return _unquote(token)
    if token == "true":
        return True
    if token == "false":
        return False
    if _DURATION.match(token):
        return parse_duration(token)
    if _NUMBER.match(token):
        return float(token) if "." in token else int(token)
    raise ValueError(f"not a literal: {token!r}")


def parse_predicate(text: str) -> Predicate:
    """Parse `key op literal`, e.g. 'SpO2 < 93' or 'route == "oral"'."""
    tokens = _scan(text)
    if len(tokens) != 3 or tokens[0][0] != "word" or tokens[1][0] != "op":
        raise ValueError(f"expected 'key op literal', got {text!r}")
    key = tokens[0][1]
    if not _NAME.match(key):
        raise ValueError(f"bad blackboard key {key!r}")
    kind, raw = tokens[2]
    if kind == "op" or kind == "at_id":
        raise ValueError(f"not a literal: {raw!r}")
    return Predicate(key, tokens[1][1], parse_literal(raw))


def _scan(text: str) -> list[tuple[str, str]]:
    tokens = []
    for match in _TOKEN.finditer(text):
        kind = match.lastgroup
        if kind == "bad":
            raise ValueError(f"unexpected character {match.group()!r}")
        tokens.append((kind, match.group()))
    return tokens


@dataclass
class _Line:
    number: int
    level: int
    keyword: str
    tokens: list[tuple[str, str]]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.diagnostics: list[Diagnostic] = []

    def fail(self, line: int, message: str) -> None:
        self.diagnostics.append(Diagnostic(line, message))

    # -- lexical pass --------------------------------------------------

    def lines(self) -> list[_Line]:
        out = []
        for number, raw in enumerate(self.text.splitlines(), start=1):
            body = _strip_comment(raw)
            if not body.strip():
                continue
            stripped = body.lstrip(" ")
            indent = len(body) - len(stripped)
            if "\t" in body[:indent] or stripped.startswith("\t"):
                self.fail(number, "tabs are not allowed; indent with two spaces per level")
                continue
            if indent % len(INDENT) != 0:
                self.fail(number, f"indent of {indent} is not a multiple of {len(INDENT)}")
                continue
            try:
                tokens = _scan(stripped.rstrip())
            except ValueError as exc:
                self.fail(number, str(exc))
                continue
            if tokens[0][0] != "word":
                self.fail(number, f"expected a node keyword, got {tokens[0][1]!r}")
                continue
            out.append(_Line(number, indent // len(INDENT), tokens[0][1], tokens[1:]))
        return out

    # -- per-line node construction -------------------------------------

    def build_spec(self, line: _Line) -> NodeSpec | None:
        tokens = list(line.tokens)
        keyword = line.keyword

        def take_word(what: str) -> str | None:
            if tokens and tokens[0][0] == "word":
                return tokens.pop(0)[1]
            self.fail(line.number, f"{keyword!r} needs {what}")
            return None

        spec: NodeSpec | None = None
        if keyword in ("sequence", "selector"):
            kind = NodeKind.SEQUENCE if keyword == "sequence" else NodeKind.SELECTOR
            spec = NodeSpec(kind)
        elif keyword == "parallel":
            raw = take_word("a success threshold")
            if raw is None:
                return None
            if not raw.isdigit() or int(raw) < 1:
                self.fail(line.number, f"parallel threshold must be a positive integer, got {raw!r}")
                return None
            spec = NodeSpec(NodeKind.PARALLEL, threshold=int(raw))
        elif keyword == "retry":
            raw = take_word("a maximum attempt count")
            if raw is None:
                return None
            if not raw.isdigit() or int(raw) < 1:
                self.fail(line.number, f"retry count must be a positive integer, got {raw!r}")
                return None
            spec = NodeSpec(NodeKind.DECORATOR, policy=RetryLimit(int(raw)))
        elif keyword == "repeat-until":
            if len(tokens) < 3:
                self.fail(line.number, "repeat-until needs a condition: key op literal")
                return None
            (k_kind, key), (op_kind, op), (v_kind, value) = tokens[:3]
            del tokens[:3]
            if k_kind != "word" or not _NAME.match(key):
                self.fail(line.number, f"bad blackboard key {key!r}")
                return None
            if op_kind != "op":
                self.fail(line.number, f"expected a comparison operator, got {op!r}")
                return None
            try:
                literal = parse_literal(value) if v_kind in ("word", "quoted") else None
            except ValueError:
                literal = None
            if literal is None:
                self.fail(line.number, f"bad literal {value!r} in repeat-until condition")
                return None
            spec = NodeSpec(NodeKind.DECORATOR, policy=RepeatUntil(Predicate(key, op, literal)))
        elif keyword == "timer":
            key = take_word("a blackboard key holding the period")
            if key is None:
                return None
            if not _NAME.match(key):
                self.fail(line.number, f"bad blackboard key {key!r}")
                return None
            spec = NodeSpec(NodeKind.DECORATOR, policy=PeriodicTimer(key))
        elif keyword == "recovery":
            spec = NodeSpec(NodeKind.RECOVERY)
        elif keyword in ("action", "query"):
            name = take_word("a leaf name")
            if name is None:
                return None
            if not _NAME.match(name):
                self.fail(line.number, f"bad leaf name {name!r}")
                return None
            kind = NodeKind.ACTION if keyword == "action" else NodeKind.QUERY
            spec = NodeSpec(kind, name=name)
        else:
            self.fail(line.number, f"unknown node keyword {keyword!r}")
            return None

        # optional @id, then optional "label"
        if tokens and tokens[0][0] == "at_id":
            spec.id = tokens.pop(0)[1][1:]
        if tokens and tokens[0][0] == "quoted":
            spec.label = _unquote(tokens.pop(0)[1])
        if tokens:
            self.fail(line.number, f"unexpected trailing {tokens[0][1]!r}")
            return None
        return spec

    # -- structure ------------------------------------------------------

    def parse(self, name: str = "", source: str = "") -> BehaviorTree:
        lines = self.lines()
        if self.diagnostics:
            raise ParseError(self.diagnostics)
        if not lines:
            raise ParseError([Diagnostic(1, "empty input: expected a root line")])

        head = lines[0]
        if head.keyword != "root" or head.level != 0:
            self.fail(head.number, "the first node must be an unindented 'root' line")
            raise ParseError(self.diagnostics)
        root_tokens = list(head.tokens)
        root_id = None
        root_label = ""
        if root_tokens and root_tokens[0][0] == "at_id":
            root_id = root_tokens.pop(0)[1][1:]
        if root_tokens and root_tokens[0][0] == "quoted":
            root_label = _unquote(root_tokens.pop(0)[1])
        if root_tokens:
            self.fail(head.number, f"unexpected trailing {root_tokens[0][1]!r} after root")

        children: dict[int, list[NodeSpec]] = {}  # line number -> child specs
        arity: dict[int, tuple[_Line, NodeSpec]] = {}
        stack: list[tuple[int, int]] = [(0, head.number)]  # (level, line number)
        top_level: list[NodeSpec] = []
        children[head.number] = top_level
        seen_ids: dict[str, int] = {} if root_id is None else {root_id: head.number}

        for line in lines[1:]:
            if line.keyword == "root":
                self.fail(line.number, "only one root line is allowed")
                continue
            if line.level == 0:
                self.fail(line.number, "every node after root must be indented under it")
                continue
            while stack and stack[-1][0] >= line.level:
                stack.pop()
            if not stack or stack[-1][0] != line.level - 1:
                self.fail(line.number, "line is indented too deeply for its parent")
                continue
            spec = self.build_spec(line)
            if spec is None:
                continue
            if spec.id is not None:
                if spec.id in seen_ids:
                    self.fail(
                        line.number,
                        f"duplicate id @{spec.id} (first used on line {seen_ids[spec.id]})",
                    )
                seen_ids[spec.id] = line.number
            children[line.number] = spec.children
            children[stack[-1][1]].append(spec)
            arity[line.number] = (line, spec)
            stack.append((line.level, line.number))

        for number, (line, spec) in arity.items():
            got = len(spec.children)
            if spec.kind in (NodeKind.SEQUENCE, NodeKind.SELECTOR, NodeKind.PARALLEL):
                if got < 1:
                    self.fail(number, f"{line.keyword} needs at least one child")
                elif spec.kind is NodeKind.PARALLEL and spec.threshold > got:
                    self.fail(number, f"parallel threshold {spec.threshold} exceeds its {got} children")
            elif spec.kind is NodeKind.DECORATOR and got != 1:
                self.fail(number, f"{line.keyword} needs exactly one child, found {got}")
            elif spec.kind is NodeKind.RECOVERY and got != 2:
                self.fail(number, f"recovery needs exactly two children (main, recovery), found {got}")
            elif spec.kind in (NodeKind.ACTION, NodeKind.QUERY) and got:
                self.fail(number, f"{line.keyword} leaves cannot have children")

        if len(top_level) != 1:
            self.fail(head.number, f"root needs exactly one child, found {len(top_level)}")
        if self.diagnostics:
            self.diagnostics.sort(key=lambda d: d.line)
            raise ParseError(self.diagnostics)

        from .tree import build_tree

        try:
            tree = build_tree(
                top_level[0], name=name, source=source, root_label=root_label, root_id=root_id
            )
        except ValueError as exc:  # duplicate explicit ids
            raise ParseError([Diagnostic(0, str(exc))]) from exc
        return ensure_valid(tree)


def parse_tree(text: str, name: str = "", source: str = "") -> BehaviorTree:
    return _Parser(text).parse(name=name, source=source)


# ---------------------------------------------------------------------------
# Canonical serialization


def _keyword_for(node: Node) -> str:
    kind = node.kind
    if kind is NodeKind.ROOT:
        return "root"
    if kind is NodeKind.SEQUENCE:
        return "sequence"
    if kind is NodeKind.SELECTOR:
        return "selector"
    if kind is NodeKind.PARALLEL:
        return f"parallel {node.threshold}"
    if kind is NodeKind.RECOVERY:
        return "recovery"
    if kind is NodeKind.ACTION:
        return f"action {node.name}"
    if kind is NodeKind.QUERY:
        return f"query {node.name}"
    policy = node.policy
    if isinstance(policy, RetryLimit):
        return f"retry {policy.max_attempts}"
    if isinstance(policy, RepeatUntil):
        p = policy.condition
        return f"repeat-until {p.key} {p.op} {literal_text(p.value)}"
    assert isinstance(policy, PeriodicTimer)
    return f"timer {policy.period_key}"


def serialize(tree: BehaviorTree) -> str:
    """Canonical text form; parse_tree(serialize(t)) reproduces t."""
    ensure_valid(tree)
    lines: list[str] = []

    def emit(node_id: str, level: int) -> None:
        node = tree.node(node_id)
        parts = [_keyword_for(node)]
        if node.explicit_id:
            parts.append(f"@{node.id}")
        if node.label:
            parts.append(_quote(node.label))
        lines.append(INDENT * level + " ".join(parts))
        for child in node.children:
            emit(child, level + 1)

    emit(tree.root_id, 0)
    return "\n".join(lines) + "\n"
