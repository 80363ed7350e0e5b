"""HTTP API for interactive design sessions.

Sessions persist as append-only files under the artifacts directory (one
subdirectory per session with a meta file and one file per turn), so GET
endpoints survive a process restart.  Turn-creating endpoints hold a
per-session lock: a second concurrent generate/refine on the same session
gets 409 instead of queueing.  Binds to loopback by default; there is no
authentication, this is a local design tool.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from pydantic import BaseModel

from .devicespec import DeviceSpec, canonical_serialize, document_to_spec, render_document, validate
from .erc import ErcReport
from .export import to_flat_netlist, to_graph_doc
from .llmgateway import Provider, ProviderError, ReplayMiss, TransportError
from .partsdb import KnowledgeBase, bundled_kb
from .pipeline import (
    GenerationRun,
    NoBaseSpec,
    ParseFailure,
    PromptTemplate,
    Session,
    bundled_template,
    generate_in_session,
    refine,
    run_to_json,
)
from .specparser import diagnostics_to_json


class CreateSessionBody(BaseModel):
    provider: str | None = None


class GenerateBody(BaseModel):
    description: str = ""


class RefineBody(BaseModel):
    text: str = ""


@dataclass
class _StoredSession:
    session: Session
    provider_name: str
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory session registry backed by append-only files on disk."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, _StoredSession] = {}
        self._registry_lock = threading.Lock()
        self._restore()

    def _session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def _restore(self) -> None:
        for directory in sorted(self.root.iterdir()) if self.root.exists() else []:
            meta_path = directory / "meta.json"
            if not meta_path.is_file():
                continue
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            session = Session(id=meta["id"])
            for turn_path in sorted(directory.glob("turn-*.json")):
                payload = json.loads(turn_path.read_text(encoding="utf-8"))
                run_data = payload["run"]
                spec = (
                    document_to_spec(run_data["spec"])
                    if run_data.get("spec") is not None
                    else None
                )
                run = GenerationRun(
                    description=run_data["description"],
                    spec=spec,
                    iterations=run_data["iterations"],
                    termination=run_data["termination"],
                    transcript_ref=run_data["transcript_ref"],
                    erc_history=tuple(
                        ErcReport.from_json(r) for r in run_data["erc_history"]
                    ),
                    warnings=tuple(run_data.get("warnings", ())),
                )
                from .pipeline import Turn

                session.turns.append(Turn(user_text=payload["user_text"], run=run))
            self._sessions[session.id] = _StoredSession(
                session=session, provider_name=meta["provider"]
            )

    def create(self, session_id: str, provider_name: str) -> Session:
        session = Session(id=session_id)
        with self._registry_lock:
            self._sessions[session_id] = _StoredSession(session, provider_name)
        directory = self._session_dir(session_id)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "meta.json").write_text(
            json.dumps({"id": session_id, "provider": provider_name}) + "\n",
            encoding="utf-8",
        )
        return session

    def get(self, session_id: str) -> _StoredSession | None:
        return self._sessions.get(session_id)

    def persist_turn(self, session: Session) -> None:
        index = len(session.turns) - 1
        turn = session.turns[index]
        payload = {"user_text": turn.user_text, "run": run_to_json(turn.run)}
        path = self._session_dir(session.id) / f"turn-{index:04d}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, ensure_ascii=False) + "\n", encoding="utf-8")
        tmp.rename(path)


def _spec_document_text(spec: DeviceSpec) -> str:
    return render_document(spec) if validate(spec) else canonical_serialize(spec)


def _turn_summary(session: Session) -> dict[str, Any]:
    turn = session.turns[-1]
    run = turn.run
    return {
        "session": session.id,
        "turn": len(session.turns),
        "user_text": turn.user_text,
        "iterations": run.iterations,
        "termination": run.termination,
        "spec": json.loads(_spec_document_text(run.spec)) if run.spec else None,
        "erc": run.erc_history[-1].to_json() if run.erc_history else None,
        "warnings": list(run.warnings),
    }


def create_app(
    providers: Mapping[str, Provider],
    kb: KnowledgeBase | None = None,
    template: PromptTemplate | None = None,
    artifacts_dir: str | Path = "artifacts",
    max_reflections: int = 3,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    kb = kb or bundled_kb()
    template = template or bundled_template()
    store = SessionStore(Path(artifacts_dir) / "sessions")
    app = FastAPI(title="circuitsmith design service")

    def error(status: int, detail: Any) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": detail})

    def locate(session_id: str) -> _StoredSession | None:
        return store.get(session_id)

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> Any:
        provider_name = body.provider or next(iter(providers), None)
        if provider_name not in providers:
            return error(422, f"unknown provider {provider_name!r}")
        import uuid

        session = store.create(uuid.uuid4().hex, provider_name)
        return {"id": session.id, "provider": provider_name}

    def _run_turn(session_id: str, work) -> Any:
        stored = locate(session_id)
        if stored is None:
            return error(404, "unknown session")
        if not stored.lock.acquire(blocking=False):
            return error(409, "a turn is already in flight for this session")
        try:
            provider = providers[stored.provider_name]
            work(stored.session, provider)
            store.persist_turn(stored.session)
            return _turn_summary(stored.session)
        except ParseFailure as exc:
            return error(
                422,
                {
                    "error": "parse_failure",
                    "message": str(exc),
                    "diagnostics": diagnostics_to_json(exc.diagnostics),
                },
            )
        except NoBaseSpec as exc:
            return error(422, {"error": "no_base_spec", "message": str(exc)})
        except (TransportError, ProviderError, ReplayMiss) as exc:
            detail: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
            if isinstance(exc, ProviderError):
                detail["status"] = exc.status
                detail["body"] = exc.body
            return error(502, detail)
        finally:
            stored.lock.release()

    @app.post("/sessions/{session_id}/generate")
    def generate(session_id: str, body: GenerateBody) -> Any:
        def work(session: Session, provider: Provider) -> None:
            generate_in_session(
                session, body.description, provider, template, kb=kb,
                max_reflections=max_reflections,
            )

        return _run_turn(session_id, work)

    @app.post("/sessions/{session_id}/refine")
    def refine_turn(session_id: str, body: RefineBody) -> Any:
        def work(session: Session, provider: Provider) -> None:
            refine(session, body.text, provider, template, kb=kb, max_reflections=max_reflections)

        return _run_turn(session_id, work)

    @app.get("/sessions/{session_id}/spec")
    def get_spec(session_id: str) -> Any:
        stored = locate(session_id)
        if stored is None:
            return error(404, "unknown session")
        spec = stored.session.current
        if spec is None:
            return error(404, "session has no generated device yet")
        return Response(content=_spec_document_text(spec), media_type="application/json")

    @app.get("/sessions/{session_id}/erc")
    def get_erc(session_id: str) -> Any:
        stored = locate(session_id)
        if stored is None:
            return error(404, "unknown session")
        for turn in reversed(stored.session.turns):
            if turn.run.erc_history:
                return turn.run.erc_history[-1].to_json()
        return error(404, "session has no rule-check report yet")

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str, format: str = "flat") -> Any:
        stored = locate(session_id)
        if stored is None:
            return error(404, "unknown session")
        spec = stored.session.current
        if spec is None:
            return error(404, "session has no generated device yet")
        if format == "flat":
            return PlainTextResponse(to_flat_netlist(spec, kb=kb))
        if format == "graph":
            return Response(content=to_graph_doc(spec, kb=kb), media_type="application/json")
        return error(422, f"unknown export format {format!r}; use flat or graph")

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str) -> Any:
        stored = locate(session_id)
        if stored is None:
            return error(404, "unknown session")
        turns = []
        for i, turn in enumerate(stored.session.turns, start=1):
            report = turn.run.erc_history[-1] if turn.run.erc_history else None
            turns.append(
                {
                    "turn": i,
                    "user_text": turn.user_text,
                    "iterations": turn.run.iterations,
                    "termination": turn.run.termination,
                    "erc_errors": sum(
                        1 for f in (report.findings if report else ()) if f.severity == "error"
                    ),
                    "erc_warnings": sum(
                        1 for f in (report.findings if report else ()) if f.severity == "warning"
                    ),
                }
            )
        return {"session": session_id, "turns": turns}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="studio")

    return app
