"""Interactive protocol sessions, event-sourced onto JSON-lines logs.

A session wraps an engine whose query leaves wait for a human (External) and
whose action leaves auto-complete, then advances in settled steps: tick until
the run either finishes, blocks on an External leaf, or has nothing left to do
but wait on a timer. The session's one `pending` item says what it needs next
— an outcome for a leaf, or permission to jump the virtual clock to the next
scheduled check (sessions never wait in wall-clock time).

Every mutation appends one line to the session's log; replaying a log through
the same code path reconstructs the identical session, which is also how forks
and service restarts work.
"""

from __future__ import annotations

import json
import random
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .bindings import ConstantSuccess, External, LeafBindings, bindings_from_specs, submit_outcome
from .blackboard import Blackboard
from .clock import VirtualClock
from .dsl import parse_tree, serialize
from .engine import Engine
from .errors import (
    CareTreeError,
    PendingMismatchError,
    TerminalSessionError,
    UnknownSessionError,
)
from .trace import ExecutionTrace
from .tree import BehaviorTree, NodeKind, Status
from .values import Duration, parse_duration, value_from_json, value_to_json

ADVANCE = "__advance__"

_SETTLE_CAP = 10_000


def default_interactive_bindings(tree: BehaviorTree) -> LeafBindings:
    """Queries wait for a human answer; actions complete as performed."""
    behaviors = {}
    for node in tree.nodes.values():
        if node.kind is NodeKind.QUERY:
            behaviors[node.name] = External()
        elif node.kind is NodeKind.ACTION:
            behaviors[node.name] = ConstantSuccess()
    return LeafBindings(behaviors)


@dataclass(frozen=True)
class Pending:
    """What the session needs next: a leaf outcome, or a clock advance."""

    kind: str  # "outcome" | "advance"
    leaf_name: str
    node_id: str
    prompt: str
    due: float | None = None

    def to_json(self) -> dict:
        body = {
            "kind": self.kind,
            "leafName": self.leaf_name,
            "nodeId": self.node_id,
            "prompt": self.prompt,
        }
        if self.due is not None:
            body["due"] = self.due
        return body


class Session:
    """One live protocol run; mutate only through submit()/advance()."""

    def __init__(
        self,
        session_id: str,
        protocol_name: str,
        tree: BehaviorTree,
        *,
        blackboard: dict | None = None,
        seed: int = 0,
        binding_specs: dict | None = None,
        created_at: str | None = None,
    ):
        self.id = session_id
        self.protocol_name = protocol_name
        self.tree = tree
        self.seed = seed
        self.binding_specs = binding_specs
        self.created_at = created_at or datetime.now(timezone.utc).isoformat()
        bindings = (
            bindings_from_specs(binding_specs)
            if binding_specs
            else default_interactive_bindings(tree)
        )
        self.engine = Engine(
            tree,
            bindings,
            blackboard=Blackboard({k: value_from_json(v) for k, v in (blackboard or {}).items()}),
            clock=VirtualClock(),
            trace=ExecutionTrace(),
            rng=random.Random(seed),
        )
        self.status = Status.RUNNING
        self.pending: Pending | None = None
        self._settle()

    # -- engine stepping -----------------------------------------------------

    def _settle(self) -> None:
        """Tick until terminal, blocked on an External leaf, or a timer wait."""
        if self.status is not Status.RUNNING:
            self.pending = None
            return
        for _ in range(_SETTLE_CAP):
            status = self.engine.tick()
            if status is not Status.RUNNING:
                self.status = status
                self.pending = None
                return
            if self.engine.blocked:
                node_id, leaf_name = self.engine.blocked[0]
                node = self.tree.node(node_id)
                self.pending = Pending(
                    kind="outcome",
                    leaf_name=leaf_name,
                    node_id=node_id,
                    prompt=node.label or leaf_name,
                )
                return
            wakes = self.engine.wake_times()
            if self.engine.events_this_tick == 0:
                if not wakes:
                    raise CareTreeError(
                        f"session {self.id}: running but nothing to wait for (stuck)"
                    )
                due = min(wakes)
                self.pending = Pending(
                    kind="advance",
                    leaf_name=ADVANCE,
                    node_id=self._next_timer_id(due),
                    prompt=f"advance virtual time to the next scheduled check (t={due:g}s)",
                    due=due,
                )
                return
        raise CareTreeError(f"session {self.id}: did not settle within {_SETTLE_CAP} ticks")

    def _next_timer_id(self, due: float) -> str:
        for node_id, st in self.engine.state.node_states.items():
            if not st.firing and st.next_fire is not None and st.next_fire == due:
                return node_id
        return self.tree.root_id

    # -- mutations -----------------------------------------------------------

    def submit(self, leaf_name: str, outcome: Status | None, elapsed: Duration | None = None) -> None:
        if self.status is not Status.RUNNING:
            raise TerminalSessionError(f"session {self.id} already ended {self.status.value}")
        if self.pending is None or leaf_name != self.pending.leaf_name:
            expected = self.pending.leaf_name if self.pending else None
            raise PendingMismatchError(leaf_name, expected)
        if leaf_name == ADVANCE:
            assert self.pending.due is not None
            self.engine.clock.advance_to(self.pending.due)
        else:
            if outcome is None:
                raise CareTreeError("an outcome is required for a leaf submission")
            submit_outcome(self.engine.state, leaf_name, outcome, elapsed)
        self._settle()

    # -- views ---------------------------------------------------------------

    def node_statuses(self) -> dict[str, str | None]:
        """Latest per-node status; None for nodes not yet entered this run."""
        statuses: dict[str, str | None] = {nid: None for nid in self.tree.nodes}
        for nid, status in self.engine.state.last_status.items():
            statuses[nid] = status.value
        for nid, st in self.engine.state.node_states.items():
            if st.in_pass or st.in_attempt:
                statuses[nid] = Status.RUNNING.value
        return statuses

    def view(self, include_tree: bool = False) -> dict:
        body = {
            "id": self.id,
            "protocol": self.protocol_name,
            "status": self.status.value,
            "pending": self.pending.to_json() if self.pending else None,
            "time": self.engine.clock.now,
            "blackboard": {k: value_to_json(v) for k, v in self.engine.blackboard.snapshot().items()},
            "nodeStatuses": self.node_statuses(),
            "traceLength": len(self.engine.trace),
        }
        if include_tree:
            body["tree"] = self.tree.to_dict()
        return body


class SessionStore:
    """Sessions by id, each persisted as an append-only JSON-lines log.

    All mutations to one session happen under that session's lock; reads see
    the session between settled steps, never mid-tick.
    """

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _log_path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.jsonl"

    def _append(self, session_id: str, record: dict) -> None:
        with self._log_path(session_id).open("a") as fh:
            fh.write(json.dumps(record) + "\n")

    # -- lifecycle -----------------------------------------------------------

    def create(
        self,
        protocol_name: str,
        tree: BehaviorTree,
        *,
        blackboard: dict | None = None,
        seed: int = 0,
        binding_specs: dict | None = None,
    ) -> Session:
        session_id = uuid.uuid4().hex[:12]
        # Round-trip the tree through its serialized form so the live session
        # is built from exactly what a later replay will parse.
        session = Session(
            session_id,
            protocol_name,
            parse_tree(serialize(tree), name=protocol_name),
            blackboard=blackboard,
            seed=seed,
            binding_specs=binding_specs,
        )
        self._append(
            session_id,
            {
                "kind": "created",
                "id": session_id,
                "protocol": protocol_name,
                "tree": serialize(tree),
                "blackboard": blackboard or {},
                "seed": seed,
                "bindings": binding_specs,
                "createdAt": session.created_at,
            },
        )
        with self._registry_lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        path = self._log_path(session_id)
        if not path.exists():
            raise UnknownSessionError(f"no session {session_id!r}")
        session = self.replay(path.read_text().splitlines())
        with self._registry_lock:
            self._sessions.setdefault(session_id, session)
        return session

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.sessions_dir.glob("*.jsonl"))

    # -- mutations -----------------------------------------------------------

    def submit(
        self,
        session_id: str,
        leaf_name: str,
        outcome: Status | None,
        elapsed: Duration | None = None,
    ) -> Session:
        with self._lock_for(session_id):
            session = self.get(session_id)
            session.submit(leaf_name, outcome, elapsed)
            record: dict = {"kind": "advance"} if leaf_name == ADVANCE else {
                "kind": "outcome",
                "leaf": leaf_name,
                "outcome": outcome.value if outcome else None,
            }
            if elapsed is not None:
                record["elapsed"] = value_to_json(elapsed)
            self._append(session_id, record)
        return session

    def fork(self, session_id: str) -> Session:
        """Deep copy under a new id by replaying the original's log."""
        with self._lock_for(session_id):
            self.get(session_id)  # ensure it exists
            lines = self._log_path(session_id).read_text().splitlines()
        new_id = uuid.uuid4().hex[:12]
        records = [json.loads(line) for line in lines]
        records[0] = dict(records[0], id=new_id)
        fork = self._replay_records(records)
        path = self._log_path(new_id)
        with path.open("a") as fh:
            for record in records:
                fh.write(json.dumps(record) + "\n")
            fh.write(json.dumps({"kind": "forked", "from": session_id}) + "\n")
        with self._registry_lock:
            self._sessions[new_id] = fork
        return fork

    # -- replay --------------------------------------------------------------

    def replay(self, lines: list[str]) -> Session:
        return self._replay_records([json.loads(line) for line in lines if line.strip()])

    def _replay_records(self, records: list[dict]) -> Session:
        if not records or records[0].get("kind") != "created":
            raise CareTreeError("session log must start with a created record")
        head = records[0]
        session = Session(
            head["id"],
            head["protocol"],
            parse_tree(head["tree"], name=head["protocol"]),
            blackboard=head.get("blackboard") or {},
            seed=head.get("seed", 0),
            binding_specs=head.get("bindings"),
            created_at=head.get("createdAt"),
        )
        for record in records[1:]:
            kind = record.get("kind")
            if kind == "outcome":
                elapsed = record.get("elapsed")
                session.submit(
                    record["leaf"],
                    Status(record["outcome"]),
                    None if elapsed is None else _elapsed_from_json(elapsed),
                )
            elif kind == "advance":
                session.submit(ADVANCE, None)
            elif kind == "forked":
                continue
            else:
                raise CareTreeError(f"unknown session log record kind {kind!r}")
        return session


def _elapsed_from_json(raw) -> Duration:
    value = value_from_json(raw)
    if isinstance(value, Duration):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Duration(float(value))
    if isinstance(value, str):
        return parse_duration(value)
    raise CareTreeError(f"bad elapsed value {raw!r}")
