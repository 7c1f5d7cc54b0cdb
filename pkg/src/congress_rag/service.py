"""HTTP facade over sessions, pipeline runs, review actions, and traces.

Runs execute asynchronously (background thread) and clients poll GET
/api/runs/{id}. Mutating endpoints honor an Idempotency-Key header: the
same key replays the stored response instead of repeating the side effect.
No auth and no TLS here; this is a single-researcher local tool.
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .agent.loop import Conversation, run_turn
from .errors import (IllegalStateError, NotFoundError, ProviderError,
                     ProviderTimeoutError)
from .pipeline import GridlockPipeline, _report_from_entry


class MessageBody(BaseModel):
    text: str = Field(min_length=1)


class RunBody(BaseModel):
    congress: int = Field(gt=0)
    no_review: bool = False


class OverrideBody(BaseModel):
    threshold: float | None = None
    bill_overrides: dict[str, bool] | None = None
    actor: str = "console"


class ServiceState:
    def __init__(self, pipeline: GridlockPipeline, chat_provider=None,
                 system_prompt: str = "You are a congressional research assistant."):
        self.pipeline = pipeline
        self.chat_provider = chat_provider
        self.system_prompt = system_prompt
        self.sessions: dict[str, Conversation] = {}
        self.idempotency: dict[tuple[str, str, str], Any] = {}
        self.lock = threading.Lock()
        self.run_threads: list[threading.Thread] = []


def create_app(state: ServiceState, cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="congress-rag", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["http://localhost:5173", "http://localhost:3000"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def idempotent(request: Request, handler):
        key = request.headers.get("Idempotency-Key")
        if not key:
            return handler()
        cache_key = (request.method, request.url.path, key)
        with state.lock:
            if cache_key in state.idempotency:
                return state.idempotency[cache_key]
        result = handler()
        with state.lock:
            state.idempotency[cache_key] = result
        return result

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_req, exc):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(NotFoundError)
    async def _not_found(_req, exc):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(IllegalStateError)
    async def _conflict(_req, exc):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(ProviderTimeoutError)
    async def _provider_timeout(_req, exc):
        return JSONResponse(status_code=504, content={"error": str(exc)})

    @app.exception_handler(ProviderError)
    async def _provider(_req, exc):
        return JSONResponse(status_code=502, content={"error": str(exc)})

    @app.exception_handler(ValueError)
    async def _validation(_req, exc):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    # --- sessions --------------------------------------------------------

    @app.post("/api/sessions")
    def create_session(request: Request):
        def do():
            conversation = Conversation.new(state.system_prompt)
            state.sessions[conversation.session_id] = conversation
            return {"session_id": conversation.session_id}
        return idempotent(request, do)

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody, request: Request):
        conversation = state.sessions.get(session_id)
        if conversation is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        if state.chat_provider is None:
            raise ProviderError("no chat provider configured")

        def do():
            outcome = run_turn(conversation, body.text, state.pipeline.registry,
                               state.chat_provider,
                               max_iterations=state.pipeline.config.max_iterations,
                               tracer=state.pipeline.tracer)
            return outcome.to_json()
        return idempotent(request, do)

    @app.get("/api/sessions/{session_id}/trace")
    def session_trace(session_id: str):
        return PlainTextResponse(state.pipeline.tracer.export(session_id, "jsonl"),
                                 media_type="application/x-ndjson")

    # --- runs ---------------------------------------------------------------

    @app.post("/api/runs", status_code=202)
    def start_run(body: RunBody, request: Request):
        def do():
            run = state.pipeline.create_run(body.congress, no_review=body.no_review)
            thread = threading.Thread(
                target=_execute_run, args=(state.pipeline, run.run_id, run.congress),
                daemon=True)
            state.run_threads.append(thread)
            thread.start()
            return {"run_id": run.run_id}
        return idempotent(request, do)

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        run = state.pipeline.load(run_id)
        doc = run.to_json()
        doc["cluster_reports"] = [r.to_report_json() for r in run.reports()]
        del doc["clusters"]
        return doc

    @app.get("/api/runs/{run_id}/clusters")
    def get_clusters(run_id: str):
        run = state.pipeline.load(run_id)
        reports = []
        for entry in run.clusters:
            report = _report_from_entry(entry)
            doc = report.to_report_json()
            doc["included"] = {m.bill_id.render(): m.included for m in report.bills}
            reports.append(doc)
        return reports

    @app.patch("/api/runs/{run_id}/clusters/{cluster_name}")
    def patch_cluster(run_id: str, cluster_name: str, body: OverrideBody,
                      request: Request):
        def do():
            report, gridlock = state.pipeline.review_override(
                run_id, cluster_name,
                threshold=body.threshold,
                bill_overrides=body.bill_overrides,
                actor=body.actor)
            doc = report.to_report_json()
            doc["included"] = {m.bill_id.render(): m.included for m in report.bills}
            return {"cluster_report": doc, "gridlock": gridlock.to_json()}
        return idempotent(request, do)

    @app.post("/api/runs/{run_id}/finalize")
    def finalize_run(run_id: str, request: Request):
        return idempotent(request, lambda: state.pipeline.finalize(run_id).to_json())

    @app.get("/api/runs/{run_id}/trace")
    def run_trace(run_id: str):
        return PlainTextResponse(state.pipeline.tracer.export(run_id, "jsonl"),
                                 media_type="application/x-ndjson")

    # --- gridlock series -------------------------------------------------------

    @app.get("/api/gridlock")
    def gridlock_series(request: Request):
        try:
            from_congress = int(request.query_params.get("from", "113"))
            to_congress = int(request.query_params.get("to", "118"))
        except ValueError:
            raise HTTPException(status_code=400, detail="from/to must be integers")
        latest: dict[int, tuple[str, Any]] = {}
        for run_id in state.pipeline.list_runs():
            run = state.pipeline.load(run_id)
            if run.state != "finalized" or run.result is None:
                continue
            if not from_congress <= run.congress <= to_congress:
                continue
            prior = latest.get(run.congress)
            if prior is None or run.created_at > prior[0]:
                latest[run.congress] = (run.created_at, run.result)
        return [
            {"congress": c, "score": latest[c][1].score,
             "gridlocked_clusters": latest[c][1].gridlocked_clusters,
             "total_clusters": latest[c][1].total_clusters,
             "run_id": latest[c][1].run_id}
            for c in sorted(latest)
        ]

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    return app


def _execute_run(pipeline: GridlockPipeline, run_id: str, congress: int) -> None:
    try:
        pipeline.run_congress(congress, resume_run_id=run_id)
    except Exception:  # state is persisted as failed by the pipeline
        pass
