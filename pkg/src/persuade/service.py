"""Session-oriented HTTP API over the dialogue engine.

Persistence is an append-only JSON-lines transcript per session plus a seed
snapshot; replay is the recovery mechanism. Every state change is fsynced to
the log before it is acknowledged, so a crash between any two operations
loses at most the unacknowledged one. Requests on the same session are
serialized (a second concurrent request waits up to five seconds, then gets a
busy error); distinct sessions are fully independent.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import corpus, dialogue
from .argmodel import FunctionalType, goals
from .contextengine import Atom, AtomSyntaxError
from .dialogue import (
    DialogueState,
    NoApplicableGoalError,
    ReplyShapeMismatchError,
    UnknownOptionError,
    entry_from_json,
    entry_to_json,
    new_session,
    next_system_move,
    apply_user_reply,
    render_entry,
    reply_from_payload,
    replay_transcript,
)
from .persona import Persona, SeedBelief, seed_model
from .strategy import StrategyConfig


class ServiceError(Exception):
    code = "internal"
    status = 500


class UnknownSessionError(ServiceError):
    code = "unknown-session"
    status = 404


class UnknownEntryError(ServiceError):
    code = "unknown-entry"
    status = 404


class PendingReplyError(ServiceError):
    code = "pending-reply"
    status = 409


class NoPendingError(ServiceError):
    code = "no-pending"
    status = 409


class TerminalError(ServiceError):
    code = "terminal"
    status = 410


class SessionBusyError(ServiceError):
    code = "session-busy"
    status = 409


class BadRequestError(ServiceError):
    code = "bad-request"
    status = 422


_LOCK_TIMEOUT_S = 5.0


@dataclass
class Session:
    session_id: str
    entry: str
    state: DialogueState
    created: str
    updated: str


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _parse_intake(entry: corpus.CorpusEntry, intake: dict):
    unknown = set(intake) - {"facts", "interests", "declared_goals", "beliefs"}
    if unknown:
        raise BadRequestError(f"unknown intake keys {sorted(unknown)}")
    try:
        facts = frozenset(Atom.parse(a) for a in intake.get("facts", []))
    except (AtomSyntaxError, TypeError) as exc:
        raise BadRequestError(f"bad intake fact: {exc}") from exc
    interests = frozenset(intake.get("interests", []))
    goals_ = frozenset(intake.get("declared_goals", []))
    beliefs = {}
    for arg_id, raw in intake.get("beliefs", {}).items():
        if not isinstance(raw, dict):
            raise BadRequestError(f"bad belief seed for {arg_id!r}")
        try:
            beliefs[arg_id] = SeedBelief(
                float(raw.get("value")), float(raw.get("confidence", 0.0))
            )
        except (TypeError, ValueError) as exc:
            raise BadRequestError(f"bad belief seed for {arg_id!r}: {exc}") from exc
    persona = Persona(beliefs=beliefs, facts=facts, interests=interests, goals=goals_)
    return seed_model(persona, entry.graph)


class SessionStore:
    """Durable sessions under data_dir/sessions/<id>/{seed.json,transcript.jsonl}."""

    def __init__(self, data_dir) -> None:
        self.root = Path(data_dir) / "sessions"
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- locking ----------------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def locked(self, session_id: str):
        lock = self._lock_for(session_id)
        if not lock.acquire(timeout=_LOCK_TIMEOUT_S):
            raise SessionBusyError(session_id)
        return _Unlocker(lock)

    # -- persistence ------------------------------------------------------

    def _dir(self, session_id: str) -> Path:
        return self.root / session_id

    def _fsync_write(self, path: Path, text: str, append: bool = False) -> None:
        mode = "a" if append else "w"
        with open(path, mode, encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())

    def _append_new_entries(self, session: Session, previous_len: int) -> None:
        new = session.state.transcript[previous_len:]
        if not new:
            return
        lines = "".join(render_entry(e) + "\n" for e in new)
        self._fsync_write(self._dir(session.session_id) / "transcript.jsonl", lines, append=True)
        session.updated = _now()

    # -- operations -------------------------------------------------------

    def create(self, entry_name: str, intake: dict, config: StrategyConfig) -> Session:
        try:
            entry = corpus.load_corpus_entry(entry_name)
        except corpus.UnknownEntryError as exc:
            raise UnknownEntryError(entry_name) from exc
        model = _parse_intake(entry, intake)
        try:
            state = new_session(entry.graph, entry.rules, model, config)
        except NoApplicableGoalError as exc:
            raise _NoGoal(str(exc)) from exc
        session_id = secrets.token_hex(16)
        created = _now()
        session = Session(session_id, entry_name, state, created, created)
        sdir = self._dir(session_id)
        sdir.mkdir(parents=True)
        seed = {
            "session_id": session_id,
            "entry": entry_name,
            "intake": intake,
            "config": {
                "lambda": state.config.lambda_,
                "tau": state.config.tau,
                "beta": state.config.beta,
                "theta_abandon": state.config.theta_abandon,
                "budget": state.config.budget,
            },
            "created": created,
        }
        self._fsync_write(sdir / "seed.json", json.dumps(seed, indent=2) + "\n")
        self._fsync_write(sdir / "transcript.jsonl", "")
        with self._registry_lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        session = self._recover(session_id)
        with self._registry_lock:
            return self._sessions.setdefault(session_id, session)

    def _recover(self, session_id: str) -> Session:
        sdir = self._dir(session_id)
        seed_path = sdir / "seed.json"
        if not seed_path.exists():
            raise UnknownSessionError(session_id)
        seed = json.loads(seed_path.read_text("utf-8"))
        entry = corpus.load_corpus_entry(seed["entry"])
        model = _parse_intake(entry, seed.get("intake", {}))
        config = StrategyConfig.from_mapping(seed.get("config", {}))
        lines = [
            line
            for line in (sdir / "transcript.jsonl").read_text("utf-8").splitlines()
            if line.strip()
        ]
        entries = []
        torn = False
        for idx, line in enumerate(lines):
            try:
                entries.append(entry_from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                if idx == len(lines) - 1:
                    # A crash mid-append tears at most the final line; that
                    # write was never acknowledged, so drop it.
                    torn = True
                    break
                raise dialogue.ReplayError(f"corrupt transcript line {idx + 1}: {exc}")
        state = replay_transcript(entry.graph, entry.rules, model, config, entries)
        if torn or len(state.transcript) > len(entries):
            # Self-heal: rewrite the log as the replayed (complete) transcript.
            text = "".join(render_entry(e) + "\n" for e in state.transcript)
            self._fsync_write(sdir / "transcript.jsonl", text)
        return Session(session_id, seed["entry"], state, seed["created"], _now())

    def next_move(self, session_id: str) -> tuple[dict, Session]:
        with self.locked(session_id):
            session = self.get(session_id)
            state = session.state
            if state.outcome() is not None:
                raise TerminalError(state.outcome().value)
            if state.pending is not None:
                raise PendingReplyError(str(state.pending_step))
            before = len(state.transcript)
            new_state, move = next_system_move(state)
            session.state = new_state
            self._append_new_entries(session, before)
            step = new_state.transcript[-1].step
            return {"step": step, "move": dialogue.move_to_json(move)}, session

    def post_reply(self, session_id: str, step, payload) -> dict:
        with self.locked(session_id):
            session = self.get(session_id)
            state = session.state
            if not isinstance(step, int) or isinstance(step, bool):
                raise BadRequestError("'step' must be an integer")
            reply = reply_from_payload(payload)
            pending_step = state.pending_step
            if pending_step is None or step != pending_step:
                recorded = self._recorded_ack(state, step, reply)
                if recorded is not None:
                    return recorded
                if state.outcome() is not None:
                    raise TerminalError(state.outcome().value)
                if pending_step is None:
                    raise NoPendingError("no query awaiting a reply")
                raise BadRequestError(
                    f"reply step {step} does not match pending step {pending_step}"
                )
            before = len(state.transcript)
            new_state = apply_user_reply(state, reply)
            session.state = new_state
            self._append_new_entries(session, before)
            outcome = new_state.outcome()
            ack = {"terminal": outcome is not None}
            if outcome is not None:
                ack["outcome"] = outcome.value
            return ack

    def _recorded_ack(self, state: DialogueState, step, reply) -> dict | None:
        """Idempotent double-submit: the same reply to an already-answered
        query returns the recorded acknowledgment."""
        if not isinstance(step, int) or step < 1 or step > len(state.transcript) - 1:
            return None
        asked = state.transcript[step - 1]
        answered = state.transcript[step]
        if answered.actor != dialogue.ACTOR_USER or asked.actor != dialogue.ACTOR_SYSTEM:
            return None
        if answered.move != reply:
            raise BadRequestError(f"step {step} was already answered differently")
        follow = state.transcript[step + 1] if step + 1 <= len(state.transcript) - 1 else None
        terminal_here = follow is not None and isinstance(follow.move, dialogue.Close)
        ack = {"terminal": terminal_here}
        if terminal_here:
            ack["outcome"] = follow.move.outcome.value
        return ack

    def transcript(self, session_id: str) -> list[dict]:
        with self.locked(session_id):
            session = self.get(session_id)
            return [entry_to_json(e) for e in session.state.transcript]


class _Unlocker:
    def __init__(self, lock: threading.Lock) -> None:
        self._lock = lock

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self._lock.release()
        return False


class _NoGoal(ServiceError):
    code = "no-applicable-goal"
    status = 422


def _corpus_listing() -> list[dict]:
    out = []
    for name in corpus.ENTRY_NAMES:
        entry = corpus.load_corpus_entry(name)
        graph = entry.graph
        atoms = {str(a) for arg in graph.arguments.values() for a in arg.context}
        atoms |= {str(a) for rule in entry.rules.rules for a in rule.body}
        topics = {t for arg in graph.arguments.values() for t in arg.topics}
        out.append(
            {
                "name": name,
                "goal_count": len(goals(graph, FunctionalType.PERSUASION_GOAL)),
                "argument_count": len(graph.arguments),
                "arc_count": len(graph.arcs),
                "user_goals": [
                    {"id": g, "text": graph.arguments[g].text}
                    for g in goals(graph, FunctionalType.USER_GOAL)
                ],
                "atoms": sorted(atoms),
                "topics": sorted(topics),
            }
        )
    return out


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="persuade", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def error(exc: ServiceError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "message": str(exc)}
        )

    @app.exception_handler(ServiceError)
    async def _service_error(_req, exc: ServiceError):  # pragma: no cover - glue
        return error(exc)

    @app.get("/api/v1/corpus")
    def get_corpus():
        return {"entries": _corpus_listing()}

    @app.post("/api/v1/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise BadRequestError("request body must be JSON") from None
        if not isinstance(body, dict) or "entry" not in body:
            raise BadRequestError("body must be {entry, intake?, config?}")
        intake = body.get("intake", {})
        if not isinstance(intake, dict):
            raise BadRequestError("'intake' must be an object")
        try:
            config = StrategyConfig.from_mapping(body.get("config", {}) or {})
        except ValueError as exc:
            raise BadRequestError(str(exc)) from exc
        session = store.create(body["entry"], intake, config)
        return {"session_id": session.session_id}

    @app.get("/api/v1/sessions/{session_id}/next")
    def get_next(session_id: str):
        payload, _session = store.next_move(session_id)
        return payload

    @app.post("/api/v1/sessions/{session_id}/reply")
    async def post_reply(session_id: str, request: Request):
        try:
            body = await request.json()
        except Exception:
            raise BadRequestError("request body must be JSON") from None
        if not isinstance(body, dict) or "step" not in body or "payload" not in body:
            raise BadRequestError("body must be {step, payload}")
        try:
            return store.post_reply(session_id, body["step"], body["payload"])
        except ReplyShapeMismatchError as exc:
            raise BadRequestError(f"reply-shape-mismatch: {exc}") from exc
        except UnknownOptionError as exc:
            raise BadRequestError(f"unknown-option: {exc}") from exc

    @app.get("/api/v1/sessions/{session_id}/transcript")
    def get_transcript(session_id: str):
        return {"moves": store.transcript(session_id)}

    webui_dist = Path(__file__).resolve().parent.parent.parent / "webui" / "dist"
    if webui_dist.is_dir():  # pragma: no cover - exercised by the web UI e2e
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(webui_dist), html=True), name="webui")

    return app


def serve(port: int, data_dir) -> None:
    """Blocking uvicorn runner; raises OSError when the port is taken."""
    import socket

    import uvicorn

    # Probe the port first: uvicorn exits instead of raising on a bind error.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind(("0.0.0.0", port))
    finally:
        probe.close()

    store = SessionStore(data_dir)
    app = create_app(store)
    uvicorn.run(app, host="0.0.0.0", port=port, log_level="warning")
