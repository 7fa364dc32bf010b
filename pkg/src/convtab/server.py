"""HTTP+JSON API for interactive conversational sessions.

Sessions are in-memory with idle expiry. Tables and model weights are
immutable shared state; requests to one session are serialized by a
per-session lock while different sessions proceed in parallel.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import NoParseError
from .logical_form import actions_to_json, lf_to_json, render
from .pipeline import ConversationState, answer, new_session
from .scorer import ModelWeights
from .table_model import Table

SCHEMA_VERSION = "1"
DEFAULT_IDLE_TIMEOUT = 30 * 60.0


@dataclass
class SessionRecord:
    session_id: str
    state: ConversationState
    created_at: float
    last_active: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    expired: bool = False


class SessionStore:
    def __init__(self, idle_timeout=DEFAULT_IDLE_TIMEOUT, clock=time.monotonic):
        self.idle_timeout = idle_timeout
        self.clock = clock
        self._sessions = {}
        self._registry_lock = threading.Lock()

    def create(self, table: Table) -> SessionRecord:
        now = self.clock()
        record = SessionRecord(session_id=uuid.uuid4().hex,
                               state=new_session(table),
                               created_at=now, last_active=now)
        with self._registry_lock:
            self._sessions[record.session_id] = record
        return record

    def get(self, session_id):
        """Returns (record, status): status in {'ok', 'unknown', 'expired'}."""
        with self._registry_lock:
            record = self._sessions.get(session_id)
        if record is None:
            return None, "unknown"
        if record.expired or self.clock() - record.last_active > self.idle_timeout:
            record.expired = True
            return record, "expired"
        return record, "ok"

    def delete(self, session_id) -> bool:
        with self._registry_lock:
            return self._sessions.pop(session_id, None) is not None


def _table_payload(table: Table) -> dict:
    return {
        "id": table.id,
        "headers": [col.header for col in table.columns],
        "types": [col.type.value for col in table.columns],
        "rows": [[col.cells[r].raw for col in table.columns]
                 for r in range(table.n_rows)],
    }


def _error(status, message):
    return JSONResponse(status_code=status,
                        content={"error": message,
                                 "schemaVersion": SCHEMA_VERSION})


def create_app(weights: ModelWeights, tables: dict,
               idle_timeout=DEFAULT_IDLE_TIMEOUT, beam: int = 3,
               frontend_dir=None, clock=time.monotonic) -> FastAPI:
    app = FastAPI(title="convtab")
    store = SessionStore(idle_timeout=idle_timeout, clock=clock)
    app.state.sessions = store

    @app.get("/api/health")
    def health():
        return {"status": "ok", "schemaVersion": SCHEMA_VERSION}

    @app.get("/api/tables")
    def list_tables():
        return {
            "schemaVersion": SCHEMA_VERSION,
            "tables": [{"id": t.id, "nRows": t.n_rows, "nCols": t.n_cols,
                        "headers": [c.header for c in t.columns]}
                       for t in tables.values()],
        }

    @app.post("/api/session")
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "malformed JSON body")
        if not isinstance(body, dict) or "tableId" not in body:
            return _error(400, "missing tableId")
        table = tables.get(body["tableId"])
        if table is None:
            return _error(404, f"unknown table {body['tableId']!r}")
        record = store.create(table)
        return {"sessionId": record.session_id,
                "schemaVersion": SCHEMA_VERSION,
                "table": _table_payload(table)}

    @app.post("/api/ask")
    async def ask(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "malformed JSON body")
        if (not isinstance(body, dict) or "sessionId" not in body
                or not isinstance(body.get("question"), str)
                or not body["question"].strip()):
            return _error(400, "need sessionId and a non-empty question")
        record, status = store.get(body["sessionId"])
        if status == "unknown":
            return _error(404, "unknown session")
        if status == "expired":
            return _error(410, "session expired")
        with record.lock:
            record.last_active = store.clock()
            table = record.state.table
            try:
                denotation, parse, _ = answer(record.state, body["question"],
                                              weights, beam=beam)
            except NoParseError:
                return {"schemaVersion": SCHEMA_VERSION, "answered": False,
                        "question": body["question"]}
            col_index = table.column_index(denotation.source_column)
            return {
                "schemaVersion": SCHEMA_VERSION,
                "answered": True,
                "question": body["question"],
                "logicalForm": {"text": render(parse.lf),
                                "json": lf_to_json(parse.lf)},
                "actions": actions_to_json(parse.actions),
                "sketch": parse.sketch.id.value,
                "score": parse.score,
                "denotation": {
                    "column": denotation.source_column,
                    "values": [{"row": r, "col": col_index, "text": t}
                               for r, t in denotation.values],
                },
            }

    @app.delete("/api/session/{session_id}")
    def delete_session(session_id: str):
        if not store.delete(session_id):
            return _error(404, "unknown session")
        return {"schemaVersion": SCHEMA_VERSION, "deleted": session_id}

    if frontend_dir is not None:
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="frontend")
    return app


def serve(weights, tables, port=8000, host="127.0.0.1",
          idle_timeout=DEFAULT_IDLE_TIMEOUT, beam=3, frontend_dir=None):
    """Run the API with uvicorn (blocking)."""
    import uvicorn

    app = create_app(weights, tables, idle_timeout=idle_timeout, beam=beam,
                     frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port)
