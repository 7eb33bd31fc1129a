"""Execution traces: the time-stamped event log every run and session produces."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from .tree import Status
from .values import TypedValue, value_from_json, value_to_json

NODE_ENTERED = "node_entered"
NODE_RETURNED = "node_returned"
BLACKBOARD_WRITE = "blackboard_write"
HALTED = "halted"
EVENT_APPLIED = "event_applied"

EVENT_KINDS = (NODE_ENTERED, NODE_RETURNED, BLACKBOARD_WRITE, HALTED, EVENT_APPLIED)


@dataclass(frozen=True)
class TraceEvent:
    time: float
    kind: str
    node_id: str | None = None
    status: Status | None = None
    key: str | None = None
    value: TypedValue | None = None

    def to_json(self) -> dict:
        out: dict = {"t": self.time, "kind": self.kind}
        if self.node_id is not None:
            out["node"] = self.node_id
        if self.status is not None:
            out["status"] = self.status.value
        if self.key is not None:
            out["key"] = self.key
        if self.value is not None or self.kind in (BLACKBOARD_WRITE, EVENT_APPLIED):
            out["value"] = value_to_json(self.value)
        return out

    @classmethod
    def from_json(cls, raw: dict) -> "TraceEvent":
        return cls(
            time=float(raw["t"]),
            kind=raw["kind"],
            node_id=raw.get("node"),
            status=Status(raw["status"]) if "status" in raw else None,
            key=raw.get("key"),
            value=value_from_json(raw["value"]) if raw.get("value") is not None else None,
        )


class ExecutionTrace:
    """Append-only event list with JSON-lines serialization."""

    def __init__(self, events: list[TraceEvent] | None = None):
        self.events: list[TraceEvent] = list(events or [])

    def append(self, event: TraceEvent) -> None:
        self.events.append(event)

    def append_event(self, kind: str, time: float, **fields) -> TraceEvent:
        event = TraceEvent(time=time, kind=kind, **fields)
        self.events.append(event)
        return event

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[TraceEvent]:
        return iter(self.events)

    def __getitem__(self, idx):
        return self.events[idx]

    def of_kind(self, kind: str) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == kind]

    def for_node(self, node_id: str) -> list[TraceEvent]:
        return [e for e in self.events if e.node_id == node_id]

    def entered(self, node_id: str) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == NODE_ENTERED and e.node_id == node_id]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_json(), sort_keys=True) + "\n" for e in self.events)

    @classmethod
    def from_jsonl(cls, text: str) -> "ExecutionTrace":
        events = [TraceEvent.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]
        return cls(events)
