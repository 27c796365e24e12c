"""HTTP session service for interactive spider queries.

Schemas are uploaded as text and stored on disk; a session pins a schema
and a root type, runs the initial spider query, and then accepts prune /
respider operations.  Every mutation is appended to the session's
operation log and the full session state is persisted as one JSON
document per session, so replaying the log against the schema reproduces
the stored tree exactly and state survives restarts.

Mutations on one session are serialized behind a per-session lock
(exclusive writer); reads are lock-free since documents are replaced
atomically.
"""

from __future__ import annotations

import json
import secrets
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import engine, pathexpr
from .ingest import SchemaParseError, parse_schema
from .model import ConceptualSchema, SchemaGraph, build_graph


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def replay_log(graph: SchemaGraph, schema: ConceptualSchema,
               log: list[dict]) -> engine.SpiderGraph:
    """Rebuild a session's spider graph by replaying its operation log."""
    g: engine.SpiderGraph | None = None
    for entry in log:
        op = entry["op"]
        if op == "spider":
            g = engine.spider_query(graph, schema, entry["root"])
        elif g is None:
            raise ValueError("operation log does not start with a spider operation")
        elif op == "prune":
            g = engine.prune(g, engine.parse_node_id(entry["node"]))
        elif op == "respider":
            g = engine.respider(graph, schema, g, engine.parse_node_id(entry["node"]))
        else:
            raise ValueError(f"unknown logged operation {op!r}")
    if g is None:
        raise ValueError("empty operation log")
    return g


class SessionState:
    """Live session: the persisted document plus the working spider graph."""

    def __init__(self, doc: dict, graph: engine.SpiderGraph):
        self.doc = doc
        self.graph = graph


class Store:
    """Disk-backed document store: one file per schema and per session."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.schema_dir = self.root / "schemas"
        self.session_dir = self.root / "sessions"
        self.schema_dir.mkdir(parents=True, exist_ok=True)
        self.session_dir.mkdir(parents=True, exist_ok=True)
        self._schemas: dict[str, str] = {}
        self._parsed: dict[str, tuple[ConceptualSchema, SchemaGraph]] = {}
        self._sessions: dict[str, SessionState] = {}
        self._mutex = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}

    # -- schemas --------------------------------------------------------

    def add_schema(self, text: str) -> str:
        parse_schema(text)  # raises on bad input; stored text is the original
        schema_id = secrets.token_urlsafe(6)
        (self.schema_dir / f"{schema_id}.ssd").write_text(text, encoding="utf-8")
        with self._mutex:
            self._schemas[schema_id] = text
        return schema_id

    def schema_ids(self) -> list[str]:
        ids = {p.stem for p in self.schema_dir.glob("*.ssd")}
        with self._mutex:
            ids.update(self._schemas)
        return sorted(ids)

    def schema_text(self, schema_id: str) -> str | None:
        with self._mutex:
            if schema_id in self._schemas:
                return self._schemas[schema_id]
        path = self.schema_dir / f"{schema_id}.ssd"
        if not path.exists():
            return None
        text = path.read_text(encoding="utf-8")
        with self._mutex:
            self._schemas[schema_id] = text
        return text

    def schema_objects(self, schema_id: str) -> tuple[ConceptualSchema, SchemaGraph] | None:
        with self._mutex:
            if schema_id in self._parsed:
                return self._parsed[schema_id]
        text = self.schema_text(schema_id)
        if text is None:
            return None
        schema = parse_schema(text)
        graph = build_graph(schema)
        with self._mutex:
            self._parsed[schema_id] = (schema, graph)
        return schema, graph

    # -- sessions -------------------------------------------------------

    def session_lock(self, session_id: str) -> threading.Lock:
        with self._mutex:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def new_session_id(self) -> str:
        return secrets.token_urlsafe(6)

    def save_session(self, state: SessionState) -> None:
        path = self.session_dir / f"{state.doc['id']}.json"
        path.write_text(canonical_json(state.doc), encoding="utf-8")
        with self._mutex:
            self._sessions[state.doc["id"]] = state

    def get_session(self, session_id: str) -> SessionState | None:
        with self._mutex:
            if session_id in self._sessions:
                return self._sessions[session_id]
        path = self.session_dir / f"{session_id}.json"
        if not path.exists():
            return None
        doc = json.loads(path.read_text(encoding="utf-8"))
        objects = self.schema_objects(doc["schema_id"])
        if objects is None:
            raise ValueError(f"session {session_id} references a missing schema")
        schema, graph = objects
        state = SessionState(doc, replay_log(graph, schema, doc["log"]))
        with self._mutex:
            self._sessions[session_id] = state
        return state


class SessionCreate(BaseModel):
    schema_id: str
    root_type: str


class OpRequest(BaseModel):
    op: Literal["prune", "respider"]
    node: str


def _session_doc(session_id: str, schema_id: str, root_type: str,
                 g: engine.SpiderGraph, schema: ConceptualSchema,
                 log: list[dict], created: str) -> dict:
    expr = pathexpr.root_expr(g, schema)
    return {
        "id": session_id,
        "schema_id": schema_id,
        "root_type": root_type,
        "tree": engine.tree_doc(g, schema),
        "expression": pathexpr.render(expr),
        "verbalization": pathexpr.verbalize(expr, schema),
        "log": log,
        "created": created,
        "updated": _now(),
    }


def create_app(store: Store, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="spiderquery session service")

    @app.post("/schemas", status_code=201)
    async def create_schema(request: Request):
        text = (await request.body()).decode("utf-8", errors="replace")
        try:
            schema_id = store.add_schema(text)
        except SchemaParseError as err:
            detail = {
                "violations": [
                    {"line": v.line, "column": v.column, "message": v.message}
                    for v in err.violations
                ]
            }
            return JSONResponse(status_code=400, content=detail)
        return {"id": schema_id, "violations": []}

    @app.get("/schemas")
    def list_schemas():
        out = []
        for schema_id in store.schema_ids():
            objects = store.schema_objects(schema_id)
            if objects is None:
                continue
            schema, _ = objects
            out.append({
                "id": schema_id,
                "types": list(schema.types),
                "obj_types": list(schema.obj_types),
            })
        return out

    @app.get("/schemas/{schema_id}", response_class=PlainTextResponse)
    def get_schema(schema_id: str):
        text = store.schema_text(schema_id)
        if text is None:
            raise HTTPException(404, f"unknown schema {schema_id}")
        return text

    @app.get("/schemas/{schema_id}/graph")
    def get_schema_graph(schema_id: str):
        objects = store.schema_objects(schema_id)
        if objects is None:
            raise HTTPException(404, f"unknown schema {schema_id}")
        _, graph = objects
        return graph.to_doc()

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionCreate):
        objects = store.schema_objects(body.schema_id)
        if objects is None:
            raise HTTPException(404, f"unknown schema {body.schema_id}")
        schema, graph = objects
        try:
            g = engine.spider_query(graph, schema, body.root_type)
        except engine.SpiderError as err:
            raise HTTPException(400, str(err))
        session_id = store.new_session_id()
        created = _now()
        log = [{"op": "spider", "root": body.root_type, "at": created}]
        doc = _session_doc(session_id, body.schema_id, body.root_type,
                           g, schema, log, created)
        store.save_session(SessionState(doc, g))
        return doc

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        state = store.get_session(session_id)
        if state is None:
            raise HTTPException(404, f"unknown session {session_id}")
        return state.doc

    @app.post("/sessions/{session_id}/ops")
    def apply_op(session_id: str, body: OpRequest):
        with store.session_lock(session_id):
            state = store.get_session(session_id)
            if state is None:
                raise HTTPException(404, f"unknown session {session_id}")
            objects = store.schema_objects(state.doc["schema_id"])
            schema, graph = objects
            try:
                node = engine.parse_node_id(body.node)
                if body.op == "prune":
                    g = engine.prune(state.graph, node)
                else:
                    g = engine.respider(graph, schema, state.graph, node)
            except engine.SpiderError as err:
                raise HTTPException(409, str(err))
            log = state.doc["log"] + [{"op": body.op, "node": body.node, "at": _now()}]
            doc = _session_doc(session_id, state.doc["schema_id"],
                               state.doc["root_type"], g, schema, log,
                               state.doc["created"])
            store.save_session(SessionState(doc, g))
            return doc

    @app.get("/sessions/{session_id}/expression")
    def get_expression(session_id: str, format: Literal["expr", "verbal", "tree"] = "expr"):
        state = store.get_session(session_id)
        if state is None:
            raise HTTPException(404, f"unknown session {session_id}")
        if format == "tree":
            value = state.doc["tree"]
        elif format == "expr":
            value = state.doc["expression"]
        else:
            value = state.doc["verbalization"]
        return {"session_id": session_id, "format": format, "value": value}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
