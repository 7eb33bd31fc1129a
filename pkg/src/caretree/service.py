"""HTTP API over the protocol library and live sessions.

Endpoints live under /api/v1. Protocols come from the bundled corpus plus any
uploaded over POST /api/v1/protocols; sessions are created against a protocol
and then driven by submitting outcomes for whatever leaf the session reports
as pending. If a built frontend directory is supplied, it is served at /.
"""

from __future__ import annotations

import re
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .corpus import corpus_dir, load_corpus
from .dot import export_dot
from .dsl import parse_tree, serialize
from .errors import (
    CareTreeError,
    ParseError,
    PendingMismatchError,
    TerminalSessionError,
    UnknownSessionError,
)
from .session import ADVANCE, SessionStore, _elapsed_from_json
from .tree import BehaviorTree, NodeKind, Status, validate
from .values import value_from_json

_NAME_RE = re.compile(r"^[a-z][a-z0-9-]*$")

DEFAULT_PAGE_SIZE = 100
MAX_PAGE_SIZE = 1000


class RegisteredProtocol:
    def __init__(self, name: str, title: str, tree: BehaviorTree, notes: str = "", source: str = "bundled"):
        self.name = name
        self.title = title
        self.tree = tree
        self.notes = notes
        self.source = source

    def summary(self) -> dict:
        leaves = sum(
            1 for n in self.tree.nodes.values() if n.kind in (NodeKind.ACTION, NodeKind.QUERY)
        )
        return {
            "name": self.name,
            "title": self.title,
            "source": self.source,
            "leafCount": leaves,
            "notes": self.notes,
        }


class CreateSessionBody(BaseModel):
    protocol: str
    blackboard: dict = Field(default_factory=dict)
    seed: int = 0
    bindings: dict | None = None


class OutcomeBody(BaseModel):
    leaf: str
    outcome: str | None = None
    elapsed: float | str | dict | None = None


class UploadProtocolBody(BaseModel):
    name: str
    dsl: str
    title: str = ""
    notes: str = ""


def create_app(
    data_dir: Path | str = "caretree_data",
    corpus_directory: Path | None = None,
    frontend_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="caretree", version="0.1.0")
    data_dir = Path(data_dir)
    store = SessionStore(data_dir)
    uploads_dir = data_dir / "protocols"
    uploads_dir.mkdir(parents=True, exist_ok=True)

    protocols: dict[str, RegisteredProtocol] = {}
    for entry in load_corpus(corpus_directory or corpus_dir()):
        protocols[entry.name] = RegisteredProtocol(
            entry.name, entry.title, entry.load_tree(), entry.notes
        )
    for path in sorted(uploads_dir.glob("*.bt")):
        tree = parse_tree(path.read_text(), name=path.stem, source=str(path))
        protocols[path.stem] = RegisteredProtocol(path.stem, path.stem, tree, source="uploaded")

    app.state.store = store
    app.state.protocols = protocols

    def protocol_or_404(name: str) -> RegisteredProtocol:
        protocol = protocols.get(name)
        if protocol is None:
            raise HTTPException(status_code=404, detail=f"unknown protocol {name!r}")
        return protocol

    def session_or_404(session_id: str):
        try:
            return store.get(session_id)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    # -- protocols ------------------------------------------------------------

    @app.get("/api/v1/protocols")
    def list_protocols() -> dict:
        return {"protocols": [p.summary() for p in protocols.values()]}

    @app.post("/api/v1/protocols", status_code=201)
    def upload_protocol(body: UploadProtocolBody) -> dict:
        if not _NAME_RE.match(body.name):
            raise HTTPException(status_code=400, detail="protocol name must be a lowercase slug")
        if body.name in protocols:
            raise HTTPException(status_code=409, detail=f"protocol {body.name!r} already exists")
        try:
            tree = parse_tree(body.dsl, name=body.name, source="upload")
        except ParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        problems = validate(tree)
        if problems:
            raise HTTPException(status_code=400, detail="; ".join(str(p) for p in problems))
        (uploads_dir / f"{body.name}.bt").write_text(serialize(tree))
        protocols[body.name] = RegisteredProtocol(
            body.name, body.title or body.name, tree, body.notes, source="uploaded"
        )
        return protocols[body.name].summary()

    @app.get("/api/v1/protocols/{name}")
    def get_protocol(name: str) -> dict:
        protocol = protocol_or_404(name)
        return {
            **protocol.summary(),
            "dsl": serialize(protocol.tree),
            "tree": protocol.tree.to_dict(),
            "dot": export_dot(protocol.tree, title=protocol.title),
        }

    # -- sessions ---------------------------------------------------------

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        protocol = protocol_or_404(body.protocol)
        try:
            for value in body.blackboard.values():
                value_from_json(value)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"bad blackboard value: {exc}")
        try:
            session = store.create(
                protocol.name,
                protocol.tree,
                blackboard=body.blackboard,
                seed=body.seed,
                binding_specs=body.bindings,
            )
        except CareTreeError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return session.view(include_tree=True)

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return session_or_404(session_id).view(include_tree=True)

    @app.post("/api/v1/sessions/{session_id}/outcome")
    def submit_outcome(session_id: str, body: OutcomeBody) -> dict:
        session_or_404(session_id)
        if body.leaf == ADVANCE:
            outcome = None
        else:
            if body.outcome not in ("success", "failure"):
                raise HTTPException(status_code=400, detail="outcome must be success or failure")
            outcome = Status(body.outcome)
        elapsed = None
        if body.elapsed is not None:
            try:
                elapsed = _elapsed_from_json(body.elapsed)
            except CareTreeError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
        try:
            session = store.submit(session_id, body.leaf, outcome, elapsed)
        except (PendingMismatchError, TerminalSessionError) as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return session.view(include_tree=True)

    @app.post("/api/v1/sessions/{session_id}/fork", status_code=201)
    def fork_session(session_id: str) -> dict:
        session_or_404(session_id)
        return store.fork(session_id).view(include_tree=True)

    @app.get("/api/v1/sessions/{session_id}/trace")
    def session_trace(session_id: str, page: int = 0, page_size: int = DEFAULT_PAGE_SIZE) -> dict:
        session = session_or_404(session_id)
        if page < 0:
            raise HTTPException(status_code=400, detail="page must be >= 0")
        page_size = max(1, min(page_size, MAX_PAGE_SIZE))
        events = session.engine.trace.events
        start = page * page_size
        return {
            "page": page,
            "pageSize": page_size,
            "total": len(events),
            "events": [e.to_json() for e in events[start : start + page_size]],
        }

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="frontend")

    return app
