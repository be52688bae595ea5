"""Live trainer service: clients report mistakes and outcomes, the engine
picks reinforcers.

JSON over HTTP, client-initiated only. One pending reinforcer per session at a
time; the outcome must name it. Sessions idle longer than the timeout are
closed with a SessionEnded event.
"""

from __future__ import annotations

import hashlib
import math
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .catalog import BUILTIN_CATALOGS, ReinforcerCatalog, default_engine_config
from .engine import (
    ConfigurationError,
    EngineState,
    Outcome,
    new_engine,
    preferred_reinforcer,
    record_outcome,
    select_reinforcer,
)
from .novice import Group
from .store import FileEventLog, MemoryEventLog, append_event, make_envelope

DEFAULT_PORT = 7477
IDLE_TIMEOUT_S = 30 * 60


class CreateSessionRequest(BaseModel):
    group: str
    catalog: str
    seed: int | None = None
    config: dict | None = None


class MistakeRequest(BaseModel):
    state_tag: str = ""


class OutcomeRequest(BaseModel):
    reinforcer_id: int
    rectified: bool


@dataclass
class LiveSession:
    session_id: str
    group: Group
    catalog: ReinforcerCatalog
    engine: EngineState | None
    sink: object
    rng: np.random.Generator
    pending: int | None = None
    entropy_series: list[float] = field(default_factory=list)
    total_regret: float = 0.0
    outcome_count: int = 0
    last_touch: float = 0.0
    ended: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionRegistry:
    def __init__(self, log_dir: str | None, clock, idle_timeout_s: float):
        self.log_dir = Path(log_dir) if log_dir else None
        if self.log_dir:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.clock = clock
        self.idle_timeout_s = idle_timeout_s
        self.sessions: dict[str, LiveSession] = {}
        self._lock = threading.Lock()

    def _session_id(self, req: CreateSessionRequest) -> str:
        if req.seed is not None:
            digest = hashlib.sha256(
                f"{req.seed}:{req.group}:{req.catalog}".encode()
            ).hexdigest()[:12]
        else:
            digest = uuid.uuid4().hex[:12]
        sid = digest
        with self._lock:
            bump = 2
            while sid in self.sessions:
                sid = f"{digest}-{bump}"
                bump += 1
        return sid

    def _now_ms(self) -> int:
        return int(self.clock() * 1000)

    def create(self, req: CreateSessionRequest) -> LiveSession:
        try:
            group = Group(req.group)
        except ValueError:
            raise HTTPException(400, f"unknown group {req.group!r}") from None
        catalog = BUILTIN_CATALOGS.get(req.catalog)
        if catalog is None:
            raise HTTPException(
                400, f"unknown catalog {req.catalog!r}; available: {sorted(BUILTIN_CATALOGS)}"
            )
        seed = req.seed if req.seed is not None else int.from_bytes(uuid.uuid4().bytes[:6], "big")
        try:
            config = default_engine_config(catalog, seed=seed, **(req.config or {}))
        except (ConfigurationError, TypeError) as e:
            raise HTTPException(400, f"invalid config: {e}") from None

        sid = self._session_id(req)
        sink = FileEventLog(self.log_dir / f"{sid}.log") if self.log_dir else MemoryEventLog()
        session = LiveSession(
            session_id=sid,
            group=group,
            catalog=catalog,
            engine=new_engine(config) if group is Group.LEARNED else None,
            sink=sink,
            rng=np.random.default_rng(seed),
            last_touch=self.clock(),
        )
        session.entropy_series.append(math.log2(catalog.n))
        append_event(
            sink,
            make_envelope(
                sid,
                {
                    "type": "SessionStarted",
                    "config": config.to_dict(),
                    "catalog": catalog.name,
                    "group": group.value,
                },
                timestamp=self._now_ms(),
            ),
        )
        with self._lock:
            self.sessions[sid] = session
        return session

    def get(self, session_id: str) -> LiveSession:
        with self._lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        if not session.ended and self.clock() - session.last_touch > self.idle_timeout_s:
            self._end(session)
        if session.ended:
            raise HTTPException(404, f"session {session_id!r} has ended")
        session.last_touch = self.clock()
        return session

    def _end(self, session: LiveSession):
        with session.lock:
            if session.ended:
                return
            summary = {
                "mistakes_per_phase": {},
                "records": [],
                "identified_preference": (
                    preferred_reinforcer(session.engine) if session.engine else None
                ),
                "true_preference": None,
            }
            append_event(
                session.sink,
                make_envelope(
                    session.session_id,
                    {"type": "SessionEnded", "summary": summary},
                    timestamp=self._now_ms(),
                ),
            )
            session.sink.close()
            session.ended = True

    def expire_idle(self):
        with self._lock:
            candidates = list(self.sessions.values())
        for session in candidates:
            if not session.ended and self.clock() - session.last_touch > self.idle_timeout_s:
                self._end(session)


def create_app(
    log_dir: str | None = None,
    clock=time.time,
    idle_timeout_s: float = IDLE_TIMEOUT_S,
) -> FastAPI:
    app = FastAPI(title="reinforcer trainer service")
    registry = SessionRegistry(log_dir, clock, idle_timeout_s)
    app.state.registry = registry

    @app.get("/catalogs")
    def catalogs():
        return {
            "catalogs": [
                {
                    "name": c.name,
                    "entries": [
                        {"id": e.id, "label": e.label, "message": e.message} for e in c.entries
                    ],
                }
                for c in BUILTIN_CATALOGS.values()
            ]
        }

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        registry.expire_idle()
        session = registry.create(req)
        return {
            "session_id": session.session_id,
            "catalog": [
                {"id": e.id, "label": e.label, "message": e.message}
                for e in session.catalog.entries
            ],
        }

    @app.post("/sessions/{session_id}/mistake")
    def report_mistake(session_id: str, req: MistakeRequest):
        session = registry.get(session_id)
        with session.lock:
            if session.pending is not None:
                raise HTTPException(
                    409, f"reinforcer {session.pending} is awaiting its outcome"
                )
            session.last_touch = registry.clock()
            append_event(
                session.sink,
                make_envelope(
                    session_id,
                    {"type": "MistakeObserved", "state_tag": req.state_tag},
                    timestamp=registry._now_ms(),
                ),
            )
            if session.group is Group.NONE:
                return {"reinforcer_id": None, "message": None}
            if session.group is Group.RANDOM:
                rid = int(session.rng.integers(session.catalog.n))
            else:
                rid = select_reinforcer(session.engine)
            session.pending = rid
            append_event(
                session.sink,
                make_envelope(
                    session_id,
                    {"type": "ReinforcerDispatched", "id": rid},
                    timestamp=registry._now_ms(),
                ),
            )
            return {"reinforcer_id": rid, "message": session.catalog.message_for(rid)}

    @app.post("/sessions/{session_id}/outcome")
    def report_outcome(session_id: str, req: OutcomeRequest):
        session = registry.get(session_id)
        with session.lock:
            if session.pending is None:
                raise HTTPException(409, "no reinforcer is awaiting an outcome")
            if req.reinforcer_id != session.pending:
                raise HTTPException(
                    400,
                    f"outcome names reinforcer {req.reinforcer_id} "
                    f"but {session.pending} is pending",
                )
            session.last_touch = registry.clock()
            session.pending = None
            session.outcome_count += 1
            if session.group is not Group.LEARNED:
                return {"weights": None, "entropy": None, "regret": None}
            record = record_outcome(
                session.engine, Outcome(req.reinforcer_id, req.rectified), state_tag="live"
            )
            session.entropy_series.append(record.entropy_after)
            session.total_regret += record.regret
            append_event(
                session.sink,
                make_envelope(
                    session_id,
                    {"type": "OutcomeRecorded", "record": record.to_dict()},
                    timestamp=registry._now_ms(),
                ),
            )
            return {
                "weights": list(record.weights_after),
                "entropy": record.entropy_after,
                "regret": record.regret,
            }

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        session = registry.get(session_id)
        with session.lock:
            engine = session.engine
            return {
                "interaction_count": (
                    engine.interaction_count if engine else session.outcome_count
                ),
                "weights": [float(w) for w in engine.weights] if engine else None,
                "entropy_series": list(session.entropy_series) if engine else [],
                "total_regret": session.total_regret,
                "preferred_reinforcer": preferred_reinforcer(engine) if engine else None,
            }

    return app


def serve(port: int = DEFAULT_PORT, log_dir: str | None = None, host: str = "127.0.0.1"):
    import uvicorn

    uvicorn.run(create_app(log_dir=log_dir), host=host, port=port, log_level="warning")
