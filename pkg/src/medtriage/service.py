"""HTTP facade over the triage engine for the chat UI.

Sessions live in memory with idle eviction; the corpus is immutable for the
process lifetime. Dialogue contract violations surface as 409, unknown
sessions as 404, malformed bodies as 400 with the validation details.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Literal

from fastapi import APIRouter, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dialogue import (
    DEFAULT_SUGGESTION_BATCH,
    DEFAULT_TOP_K,
    DialogueError,
    Session,
    TriageEngine,
)
from .ranking import RankerParams

DEFAULT_SESSION_TTL = 1800.0


class UnknownSessionError(Exception):
    pass


@dataclass
class _StoreEntry:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = 0.0


class SessionStore:
    """In-memory session map with idle eviction and per-session locks."""

    def __init__(self, ttl: float = DEFAULT_SESSION_TTL, clock=time.monotonic):
        self.ttl = ttl
        self.clock = clock
        self._entries: dict[str, _StoreEntry] = {}
        self._lock = threading.Lock()

    def _evict_idle(self, now: float) -> None:
        expired = [sid for sid, e in self._entries.items() if now - e.last_access > self.ttl]
        for sid in expired:
            del self._entries[sid]

    def put(self, session: Session) -> None:
        with self._lock:
            now = self.clock()
            self._evict_idle(now)
            self._entries[session.id] = _StoreEntry(session=session, last_access=now)

    def entry(self, session_id: str) -> _StoreEntry:
        with self._lock:
            now = self.clock()
            self._evict_idle(now)
            found = self._entries.get(session_id)
            if found is None:
                raise UnknownSessionError(session_id)
            found.last_access = now
            return found

    def __len__(self) -> int:
        return len(self._entries)


class SymptomBody(BaseModel):
    text: str


class ResponseBody(BaseModel):
    symptom_id: str
    answer: Literal["yes", "no"]


def create_app(
    engine: TriageEngine,
    params: RankerParams | None = None,
    top_k: int = DEFAULT_TOP_K,
    suggestion_batch: int = DEFAULT_SUGGESTION_BATCH,
    cors_origins: list[str] | None = None,
    session_ttl: float = DEFAULT_SESSION_TTL,
    clock=time.monotonic,
) -> FastAPI:
    app = FastAPI(title="medtriage", docs_url="/api/docs")
    store = SessionStore(ttl=session_ttl, clock=clock)
    default_params = params or RankerParams()
    app.state.store = store
    app.state.engine = engine

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        violations = [
            {"field": ".".join(str(p) for p in err.get("loc", ())), "message": err.get("msg", "")}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"violations": violations})

    @app.exception_handler(DialogueError)
    async def dialogue_conflict(request: Request, exc: DialogueError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(UnknownSessionError)
    async def unknown_session(request: Request, exc: UnknownSessionError):
        return JSONResponse(status_code=404, content={"error": f"unknown session: {exc}"})

    api = APIRouter(prefix="/api/v1")

    def vocab_view(symptom_id: str | None):
        if symptom_id is None:
            return None
        return engine.corpus.vocabulary.representative(symptom_id)

    @api.post("/sessions", status_code=201)
    def create_session():
        session = engine.start_session(default_params)
        store.put(session)
        return {"session_id": session.id}

    @api.post("/sessions/{session_id}/symptoms")
    def submit_symptom(session_id: str, body: SymptomBody):
        entry = store.entry(session_id)
        with entry.lock:
            match = engine.match_symptom(entry.session, body.text)
            return {
                "text": match.text,
                "matched": match.matched,
                "matched_representative": vocab_view(match.matched),
                "similarity": match.similarity,
                "alternatives": [
                    {"symptom_id": sid, "representative": vocab_view(sid), "similarity": sim}
                    for sid, sim in match.alternatives
                ],
                "confirmed": len(entry.session.confirmed),
            }

    @api.get("/sessions/{session_id}/suggestions")
    def suggestions(session_id: str, batch: int = suggestion_batch):
        entry = store.entry(session_id)
        with entry.lock:
            suggested = engine.suggest_cooccurring(entry.session, batch)
            return [
                {"symptom_id": sid, "representative": vocab_view(sid), "count": count}
                for sid, count in suggested
            ]

    @api.post("/sessions/{session_id}/responses")
    def respond(session_id: str, body: ResponseBody):
        entry = store.entry(session_id)
        with entry.lock:
            session = engine.record_response(entry.session, body.symptom_id, body.answer)
            return {"confirmed": len(session.confirmed), "declined": len(session.declined)}

    @api.post("/sessions/{session_id}/predict")
    def predict(session_id: str, k: int = top_k):
        entry = store.entry(session_id)
        with entry.lock:
            ranking = engine.predict(entry.session, k)
            return [
                {
                    "rank": r.rank,
                    "disease_id": r.disease_id,
                    "name": engine.corpus.by_id[r.disease_id].name,
                    "score": r.score,
                    "zero_score": r.zero_score,
                }
                for r in ranking
            ]

    @api.get("/sessions/{session_id}/diseases/{rank}")
    def disease_detail(session_id: str, rank: int):
        entry = store.entry(session_id)
        with entry.lock:
            record = engine.disease_detail(entry.session, rank)
            return {
                "name": record.name,
                "symptoms": list(record.raw_symptoms),
                "description": record.description,
                "treatment": record.treatment,
            }

    @api.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "corpus": {
                "diseases": engine.corpus.index.n_docs,
                "symptoms": len(engine.corpus.vocabulary),
            },
        }

    app.include_router(api)
    return app
