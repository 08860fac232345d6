"""HTTP session service over a compiled space.

Clients are stateless: every response carries the full session state
(assignments, per-value validity flags, solution count, completion, forced
bindings). The server owns the partial assignment and the undo stack.
Requests within one session are serialized by a per-session lock; sessions
idle past the TTL are evicted and answer 404 afterwards.
"""

from __future__ import annotations

import secrets
import threading
import time
from contextlib import contextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .encode import CompiledSpace
from .model import ModelError
from .session import (
    AlreadyAssignedError,
    InvalidChoiceError,
    NothingToUndoError,
    Session,
)

DEFAULT_TTL_SECONDS = 30 * 60


class ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str, **extra: str):
        super().__init__(detail)
        self.status = status
        self.body = {"error": code, "detail": detail, **extra}


class AssignBody(BaseModel):
    variable: str
    value: str


class _Entry:
    __slots__ = ("session", "lock", "last_access")

    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()
        self.last_access = time.monotonic()


class SessionRegistry:
    """Thread-safe id -> session map with idle eviction.

    Eviction only claims a session whose lock is free, so an in-flight
    request always finishes against a live entry.
    """

    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS):
        self.ttl = ttl_seconds
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    def create(self, session: Session) -> str:
        sid = secrets.token_urlsafe(16)
        with self._lock:
            self._evict_idle()
            self._entries[sid] = _Entry(session)
        return sid

    def remove(self, sid: str) -> bool:
        with self._lock:
            return self._entries.pop(sid, None) is not None

    def _evict_idle(self) -> None:
        now = time.monotonic()
        for sid, entry in list(self._entries.items()):
            if now - entry.last_access <= self.ttl:
                continue
            if entry.lock.acquire(blocking=False):
                try:
                    del self._entries[sid]
                finally:
                    entry.lock.release()

    @contextmanager
    def lease(self, sid: str):
        with self._lock:
            self._evict_idle()
            entry = self._entries.get(sid)
        if entry is None:
            raise ApiError(404, "unknown-session", f"no session {sid!r}")
        with entry.lock:
            entry.last_access = time.monotonic()
            yield entry.session
            entry.last_access = time.monotonic()


def full_state(space: CompiledSpace, session: Session) -> dict:
    model = space.model
    status = session.status()
    return {
        "assignments": [
            {
                "variable": model.variables[var].name,
                "value": model.variables[var].domain.label_of(value),
            }
            for var, value in status.assignments
        ],
        "domains": [
            {
                "variable": v.name,
                "values": [
                    {
                        "value": v.domain.label_of(j),
                        "valid": j in status.domains[v.index],
                    }
                    for j in range(v.domain.size)
                ],
            }
            for v in model.variables
        ],
        "solutionCount": str(status.solution_count),
        "complete": status.complete,
        "forced": [
            {
                "variable": model.variables[var].name,
                "value": model.variables[var].domain.label_of(value),
            }
            for var, value in status.forced
        ],
    }


def create_app(space: CompiledSpace, ttl_seconds: float = DEFAULT_TTL_SECONDS) -> FastAPI:
    app = FastAPI(title="vdconf", docs_url=None, redoc_url=None)
    # the web UI may be served from a different origin than the API
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = SessionRegistry(ttl_seconds)
    app.state.registry = registry

    @app.exception_handler(ApiError)
    async def api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "malformed-body", "detail": str(exc.errors())},
        )

    @app.get("/model")
    def get_model() -> dict:
        return {
            "variables": [
                {
                    "name": v.name,
                    "values": [v.domain.label_of(j) for j in range(v.domain.size)],
                }
                for v in space.model.variables
            ]
        }

    @app.post("/sessions", status_code=201)
    def create_session() -> dict:
        return {"id": registry.create(Session(space))}

    @app.get("/sessions/{sid}")
    def get_session(sid: str) -> dict:
        with registry.lease(sid) as session:
            return full_state(space, session)

    @app.post("/sessions/{sid}/assign")
    def assign(sid: str, body: AssignBody) -> dict:
        with registry.lease(sid) as session:
            try:
                var = space.model.var_index(body.variable)
                value = space.model.value_index(var, body.value)
            except ModelError as exc:
                raise ApiError(
                    422, "unknown-name", str(exc),
                    variable=body.variable, value=body.value,
                ) from exc
            try:
                session.assign(var, value)
            except AlreadyAssignedError as exc:
                raise ApiError(
                    409, "already-assigned", str(exc), variable=body.variable
                ) from exc
            except InvalidChoiceError as exc:
                raise ApiError(
                    422, "value-not-valid", str(exc),
                    variable=body.variable, value=body.value,
                ) from exc
            return full_state(space, session)

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str) -> dict:
        with registry.lease(sid) as session:
            try:
                session.undo()
            except NothingToUndoError as exc:
                raise ApiError(409, "nothing-to-undo", str(exc)) from exc
            return full_state(space, session)

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str) -> Response:
        if not registry.remove(sid):
            raise ApiError(404, "unknown-session", f"no session {sid!r}")
        return Response(status_code=204)

    return app
