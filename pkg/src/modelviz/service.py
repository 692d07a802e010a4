"""Session-oriented HTTP service: create a simulation from program text,
post click events, read frames and history.

Sessions live in memory, expire after an idle TTL, and serialize their
steps behind a per-session lock, so concurrent events on one session are
processed in arrival order while different sessions run in parallel.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from fastapi import Body, FastAPI, HTTPException, Response

from .apps import SimState, sim_init, sim_step
from .clicks import _pairs, clicks_structure
from .drawing import DrawingSpec, serialize
from .errors import (
    AmbiguousAction,
    InputError,
    MalformedInput,
    ModelVizError,
    NoInitialState,
    SearchBudgetExceeded,
    StaleClick,
    UnknownEventType,
)
from .parser import parse_program
from .solve import DEFAULT_NODE_BUDGET


@dataclass
class ServiceConfig:
    session_ttl: float = 1800.0
    node_budget: int = DEFAULT_NODE_BUDGET
    nbmodels_cap: int = 64
    ui_dir: Optional[str] = None
    program_path: Optional[str] = None


@dataclass
class Session:
    id: str
    state: SimState
    history: list[tuple[list, DrawingSpec]] = field(default_factory=list)
    created_at: float = field(default_factory=time.monotonic)
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _spec_response(spec: DrawingSpec) -> Response:
    return Response(content=serialize(spec), media_type="application/json")


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="modelviz", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    def _sweep() -> None:
        now = time.monotonic()
        with store_lock:
            expired = [sid for sid, s in sessions.items()
                       if now - s.last_access > config.session_ttl]
            for sid in expired:
                del sessions[sid]

    def _get(session_id: str) -> Session:
        _sweep()
        with store_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        session.last_access = time.monotonic()
        return session

    @app.post("/sessions")
    def create_session(payload: dict = Body(...)):
        from .cli import build_sim_config

        _sweep()
        program_text = payload.get("program")
        if not isinstance(program_text, str):
            raise HTTPException(status_code=400,
                                detail="the body needs a 'program' string")
        try:
            program = parse_program(program_text)
            cfg = build_sim_config(program)
        except ModelVizError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        try:
            state = sim_init(cfg, node_budget=config.node_budget)
        except NoInitialState as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except (ModelVizError, SearchBudgetExceeded) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        session = Session(id=uuid.uuid4().hex, state=state)
        session.history.append(([], state.last_spec))
        with store_lock:
            sessions[session.id] = session
        return {"id": session.id,
                "spec": json.loads(serialize(state.last_spec))}

    @app.post("/sessions/{session_id}/events")
    def post_event(session_id: str, payload: Any = Body(...)):
        session = _get(session_id)
        with session.lock:
            if session.state.finished:
                raise HTTPException(status_code=410, detail="simulation finished")
            try:
                clicks = clicks_structure(_pairs(payload))
                state = sim_step(session.state, clicks,
                                 node_budget=config.node_budget)
            except StaleClick as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from None
            except (MalformedInput, UnknownEventType, AmbiguousAction) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            except (InputError, SearchBudgetExceeded) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            session.state = state
            if state.finished:
                return {"status": "finished"}
            session.history.append((payload, state.last_spec))
            return Response(content=serialize(state.last_spec),
                            media_type="application/json")

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        session = _get(session_id)
        with session.lock:
            specs = [json.loads(serialize(spec)) for _, spec in session.history]
        return {"history": specs}

    @app.get("/sessions/{session_id}/frame")
    def get_frame(session_id: str):
        session = _get(session_id)
        with session.lock:
            if session.state.finished:
                return {"status": "finished"}
            return _spec_response(session.state.last_spec)

    @app.get("/program")
    def get_program():
        if not config.program_path:
            raise HTTPException(status_code=404, detail="no program configured")
        return Response(content=Path(config.program_path).read_text(encoding="utf-8"),
                        media_type="text/plain")

    if config.ui_dir and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
