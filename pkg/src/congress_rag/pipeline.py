"""Three-step gridlock measurement pipeline.

Step 1 asks the agent to identify salient policy issues from the article
archive; step 2 matches each issue to bills via semantic search; step 3
checks enactment status bill by bill. Runs persist as JSON documents keyed
by run_id, pause for human review before finalizing (unless no_review), and
emit a full trace from which the final score can be re-derived.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .agent.loop import Conversation, run_turn
from .agent.registry import ToolCall, ToolRegistry
from .errors import IllegalStateError, NotFoundError
from .models import (BillMatch, ClusterReport, GridlockResult, PolicyCluster,
                     compute_gridlock_score, parse_bill_id)
from .tools import DEFAULT_BILL_TOP_K, DEFAULT_THRESHOLD, search_bill_summaries
from .trace import TraceEvent, TraceRecorder
from .vectorstore import VectorStore

log = logging.getLogger(__name__)

CLUSTERS_SCHEMA = {
    "type": "object",
    "required": ["clusters"],
    "properties": {
        "clusters": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "articles", "article_count", "summary", "query"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "articles": {"type": "array", "items": {"type": "string"}},
                    "article_count": {"type": "integer", "minimum": 1},
                    "summary": {"type": "string"},
                    "query": {"type": "string", "minLength": 1},
                },
            },
        },
    },
}


def _prompt_asset(name: str) -> str:
    text = resources.files("congress_rag.agent").joinpath(f"prompts/{name}").read_text("utf-8")
    # Drop the version-comment header lines.
    return "\n".join(l for l in text.splitlines() if not l.startswith("#")).strip()


def congress_years(congress: int) -> tuple[int, int]:
    """First/second calendar year of a two-year Congress (113th = 2013-2014)."""
    start = 2013 + 2 * (congress - 113)
    return start, start + 1


@dataclass
class PipelineConfig:
    threshold: float = DEFAULT_THRESHOLD
    bill_top_k: int = DEFAULT_BILL_TOP_K
    article_top_k: int = 200
    max_iterations: int = 5
    no_review: bool = False
    agent_checks: bool = False  # route step-3 status checks through agent turns


@dataclass
class PipelineRun:
    run_id: str
    congress: int
    state: str = "pending"
    clusters: list[dict[str, Any]] = field(default_factory=list)  # per-cluster docs
    result: GridlockResult | None = None
    warnings: list[str] = field(default_factory=list)
    no_review: bool | None = None  # per-run override of the pipeline default
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_json(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "congress": self.congress,
            "state": self.state,
            "clusters": self.clusters,
            "result": self.result.to_json() if self.result else None,
            "warnings": self.warnings,
            "no_review": self.no_review,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "PipelineRun":
        return cls(
            run_id=obj["run_id"],
            congress=obj["congress"],
            state=obj["state"],
            clusters=obj.get("clusters", []),
            result=GridlockResult.from_json(obj["result"]) if obj.get("result") else None,
            warnings=obj.get("warnings", []),
            no_review=obj.get("no_review"),
            created_at=obj.get("created_at", ""),
        )

    def reports(self) -> list[ClusterReport]:
        return [_report_from_entry(entry) for entry in self.clusters]


def _match_to_doc(m: BillMatch) -> dict[str, Any]:
    return {
        "bill_id": m.bill_id.render(),
        "title": m.title,
        "summary": m.summary,
        "score": m.score,
        "enacted": m.enacted,
        "status": m.status,
        "included": m.included,
    }


def _match_from_doc(doc: dict[str, Any]) -> BillMatch:
    return BillMatch(
        bill_id=parse_bill_id(doc["bill_id"]),
        title=doc.get("title", ""),
        summary=doc.get("summary", ""),
        score=float(doc["score"]),
        enacted=bool(doc.get("enacted", False)),
        status=doc.get("status", ""),
        included=bool(doc.get("included", True)),
    )


def _report_from_entry(entry: dict[str, Any]) -> ClusterReport:
    cluster = PolicyCluster.from_json(entry["cluster"])
    candidates = [_match_from_doc(d) for d in entry["candidates"]]
    return ClusterReport.build(cluster, float(entry["threshold"]), candidates)


def compute_gridlock(reports: list[ClusterReport], congress: int = 0,
                     run_id: str = "", trace_ref: str = "") -> GridlockResult:
    if not reports:
        raise ValueError("score undefined for zero clusters")
    gridlocked = sum(1 for r in reports if not r.has_enacted_legislation)
    total = len(reports)
    return GridlockResult(
        congress=congress or 1,
        gridlocked_clusters=gridlocked,
        total_clusters=total,
        score=compute_gridlock_score(gridlocked, total),
        run_id=run_id,
        trace_ref=trace_ref,
    )


class GridlockPipeline:
    """Orchestrates runs over the agent, the stores, and the trace log."""

    def __init__(self, vector_store: VectorStore, embedder,
                 registry: ToolRegistry, provider_factory,
                 tracer: TraceRecorder, runs_dir: str | Path,
                 config: PipelineConfig | None = None):
        self.vector_store = vector_store
        self.embedder = embedder
        self.registry = registry
        self.provider_factory = provider_factory  # congress -> chat provider
        self.tracer = tracer
        self.runs_dir = Path(runs_dir)
        self.runs_dir.mkdir(parents=True, exist_ok=True)
        self.config = config or PipelineConfig()
        self._locks: dict[str, threading.Lock] = {}
        self._meta_lock = threading.Lock()

    # --- persistence --------------------------------------------------------

    def _run_path(self, run_id: str) -> Path:
        return self.runs_dir / f"{run_id}.json"

    def _run_lock(self, run_id: str) -> threading.Lock:
        with self._meta_lock:
            return self._locks.setdefault(run_id, threading.Lock())

    def save(self, run: PipelineRun) -> None:
        tmp = self._run_path(run.run_id).with_suffix(".tmp")
        tmp.write_text(json.dumps(run.to_json(), ensure_ascii=False, indent=1),
                       encoding="utf-8")
        tmp.replace(self._run_path(run.run_id))

    def load(self, run_id: str) -> PipelineRun:
        path = self._run_path(run_id)
        if not path.exists():
            raise NotFoundError(f"unknown run {run_id!r}")
        return PipelineRun.from_json(json.loads(path.read_text(encoding="utf-8")))

    def list_runs(self) -> list[str]:
        return sorted(p.stem for p in self.runs_dir.glob("*.json"))

    # --- steps ----------------------------------------------------------------

    def create_run(self, congress: int, no_review: bool | None = None) -> PipelineRun:
        run = PipelineRun(run_id=f"run-{congress}-{uuid.uuid4().hex[:8]}",
                          congress=congress, no_review=no_review)
        self.save(run)
        return run

    def step1_identify_clusters(self, run: PipelineRun, provider) -> list[PolicyCluster]:
        run.state = "step1"
        self.save(run)
        year_from, year_to = congress_years(run.congress)
        prompt = _prompt_asset("step1_identify_clusters.txt").format(
            congress=run.congress, year_from=year_from, year_to=year_to,
            article_top_k=self.config.article_top_k)
        conversation = Conversation(session_id=run.run_id,
                                    system_prompt=_prompt_asset("default_system.txt"))
        clusters: list[PolicyCluster] | None = None
        last_error = ""
        for attempt in range(2):
            text = prompt if attempt == 0 else (
                f"{prompt}\n\nYour previous response failed validation: {last_error}\n"
                "Respond again with valid JSON only.")
            outcome = run_turn(conversation, text, self.registry, provider,
                               max_iterations=self.config.max_iterations,
                               tracer=self.tracer)
            if outcome.kind != "answered":
                last_error = f"turn ended with {outcome.kind}"
                continue
            try:
                clusters = _parse_clusters(outcome.final_text)
                break
            except (ValueError, jsonschema.ValidationError) as exc:
                last_error = str(exc).splitlines()[0]
        if clusters is None:
            run.state = "failed"
            run.warnings.append(f"step1 failed: {last_error}")
            self.save(run)
            raise IllegalStateError(f"step1 failed for run {run.run_id}: {last_error}")

        run.clusters = [
            {"cluster": c.to_json(), "threshold": self.config.threshold, "candidates": []}
            for c in clusters
        ]
        run.state = "step2"
        self.tracer.record(run.run_id, "step_boundary",
                           {"step": 1, "clusters": [c.name for c in clusters]})
        self.save(run)
        return clusters

    def step2_match_bills(self, run: PipelineRun) -> list[ClusterReport]:
        run.state = "step2"
        self.save(run)
        for entry in run.clusters:
            cluster = PolicyCluster.from_json(entry["cluster"])
            try:
                hits = search_bill_summaries(
                    self.vector_store, self.embedder, cluster.query, run.congress,
                    top_k=self.config.bill_top_k, threshold=float(entry["threshold"]))
            except Exception as exc:
                entry["error"] = str(exc)
                run.warnings.append(f"step2 failed for cluster {cluster.name!r}: {exc}")
                self.tracer.record(run.run_id, "error",
                                   {"step": 2, "cluster": cluster.name, "message": str(exc)})
                continue
            entry["candidates"] = [
                {
                    "bill_id": h.doc_id,
                    "title": h.metadata.get("title", ""),
                    "summary": h.text,
                    "score": h.score,
                    "enacted": False,
                    "status": "",
                    "included": True,
                }
                for h in hits
            ]
            self.tracer.record(run.run_id, "retrieval", {
                "step": 2,
                "cluster": cluster.name,
                "query": cluster.query,
                "threshold": float(entry["threshold"]),
                "top_k": self.config.bill_top_k,
                "hits": [{"doc_id": h.doc_id, "score": h.score} for h in hits],
            })
        run.state = "step3"
        self.tracer.record(run.run_id, "step_boundary", {"step": 2})
        self.save(run)
        return run.reports()

    def step3_check_enactment(self, run: PipelineRun, provider=None) -> list[ClusterReport]:
        run.state = "step3"
        self.save(run)
        status_cache: dict[str, dict[str, Any]] = {}
        for entry in run.clusters:
            for doc in entry.get("candidates", []):
                bill_id = doc["bill_id"]
                if bill_id not in status_cache:
                    status_cache[bill_id] = self._check_one_status(run, bill_id, provider)
                status = status_cache[bill_id]
                doc["enacted"] = status["enacted"]
                doc["status"] = status["status"]
                if status.get("warning"):
                    run.warnings.append(status["warning"])
        skip_review = self.config.no_review if run.no_review is None else run.no_review
        run.state = "finalized" if skip_review else "awaiting_review"
        self.tracer.record(run.run_id, "step_boundary", {"step": 3})
        if run.state == "finalized":
            run.result = compute_gridlock(run.reports(), run.congress, run.run_id,
                                          trace_ref=run.run_id)
        self.save(run)
        return run.reports()

    def _check_one_status(self, run: PipelineRun, bill_id: str, provider) -> dict[str, Any]:
        # One small call per bill, never one oversized turn.
        if self.config.agent_checks and provider is not None:
            conversation = Conversation(session_id=run.run_id,
                                        system_prompt=_prompt_asset("default_system.txt"))
            prompt = _prompt_asset("step3_check_enactment.txt").format(bill_id=bill_id)
            outcome = run_turn(conversation, prompt, self.registry, provider,
                               max_iterations=self.config.max_iterations,
                               tracer=self.tracer)
            for _call, result in outcome.tool_calls_made:
                if not result.is_error and isinstance(result.payload, dict) \
                        and "enacted" in result.payload:
                    return {"enacted": bool(result.payload["enacted"]),
                            "status": result.payload.get("status", "")}
            return {"enacted": False, "status": "unknown",
                    "warning": f"agent status check inconclusive for {bill_id}"}

        call = ToolCall(call_id=f"status-{bill_id}-{uuid.uuid4().hex[:6]}",
                        tool_name="get_bill_status", arguments={"bill_id": bill_id})
        result = self.registry.dispatch(call, tracer=self.tracer, scope_id=run.run_id)
        if result.is_error:
            return {"enacted": False, "status": "unknown",
                    "warning": f"status lookup failed for {bill_id}: "
                               f"{result.payload.get('error_kind')}"}
        return {"enacted": bool(result.payload["enacted"]),
                "status": result.payload.get("status", "")}

    # --- review & finalization ------------------------------------------------

    def review_override(self, run_id: str, cluster_name: str,
                        threshold: float | None = None,
                        bill_overrides: dict[str, bool] | None = None,
                        actor: str = "reviewer") -> tuple[ClusterReport, GridlockResult]:
        with self._run_lock(run_id):
            run = self.load(run_id)
            if run.state not in ("awaiting_review", "finalized"):
                raise IllegalStateError(
                    f"run {run_id} is in state {run.state}; overrides need awaiting_review or finalized")
            if threshold is not None and not -1.0 <= threshold <= 1.0:
                raise ValueError(f"threshold {threshold} outside [-1, 1]")
            entry = next((e for e in run.clusters
                          if e["cluster"]["name"] == cluster_name), None)
            if entry is None:
                raise NotFoundError(f"run {run_id} has no cluster {cluster_name!r}")
            if threshold is not None:
                entry["threshold"] = threshold
            for bill_id, included in (bill_overrides or {}).items():
                for doc in entry["candidates"]:
                    if doc["bill_id"] == bill_id:
                        doc["included"] = bool(included)
            self.tracer.record(run_id, "override", {
                "cluster": cluster_name,
                "threshold": threshold,
                "bill_overrides": bill_overrides or {},
                "actor": actor,
                "at": datetime.now(timezone.utc).isoformat(),
            })
            result = compute_gridlock(run.reports(), run.congress, run_id, trace_ref=run_id)
            if run.state == "finalized":
                run.result = result
            self.save(run)
            return _report_from_entry(entry), result

    def finalize(self, run_id: str) -> GridlockResult:
        with self._run_lock(run_id):
            run = self.load(run_id)
            if run.state != "awaiting_review":
                raise IllegalStateError(
                    f"run {run_id} is in state {run.state}; finalize needs awaiting_review")
            run.result = compute_gridlock(run.reports(), run.congress, run_id,
                                          trace_ref=run_id)
            run.state = "finalized"
            self.save(run)
            return run.result

    # --- orchestration ----------------------------------------------------------

    def run_congress(self, congress: int, resume_run_id: str | None = None) -> PipelineRun:
        if resume_run_id:
            run = self.load(resume_run_id)
        else:
            run = self.create_run(congress)
        provider = self.provider_factory(congress)
        if run.state in ("pending", "step1"):
            self.step1_identify_clusters(run, provider)
        if run.state == "step2":
            self.step2_match_bills(run)
        if run.state == "step3":
            self.step3_check_enactment(run, provider)
        return self.load(run.run_id)

    def run_series(self, from_congress: int, to_congress: int) -> list[GridlockResult]:
        results = []
        for congress in range(from_congress, to_congress + 1):
            try:
                run = self.run_congress(congress)
            except Exception as exc:
                log.error("run for congress %d failed: %s", congress, exc)
                continue
            if run.result is not None:
                results.append(run.result)
            elif run.state == "awaiting_review":
                # Series mode is batch replay; reviewless finalize.
                results.append(self.finalize(run.run_id))
        return results


def _parse_clusters(text: str) -> list[PolicyCluster]:
    doc = _extract_json(text)
    jsonschema.validate(doc, CLUSTERS_SCHEMA)
    return [PolicyCluster.from_json(c) for c in doc["clusters"]]


def _extract_json(text: str) -> dict[str, Any]:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        start = text.find("{")
        end = text.rfind("}")
        if start == -1 or end <= start:
            raise ValueError("response contains no JSON object")
        return json.loads(text[start:end + 1])


# --- trace re-derivation ------------------------------------------------------

def rederive_gridlock(events: list[TraceEvent]) -> dict[str, Any]:
    """Recompute the gridlock score purely from trace events.

    Uses step-2 retrieval events for cluster candidates, get_bill_status
    call/result pairs for enactment, and override events for thresholds and
    include flags. Serves as the independent audit path for stored results.
    """
    clusters: dict[str, dict[str, Any]] = {}
    enacted: dict[str, bool] = {}
    pending_calls: dict[str, str] = {}

    for event in events:
        if event.kind == "retrieval" and event.payload.get("step") == 2:
            clusters[event.payload["cluster"]] = {
                "threshold": float(event.payload["threshold"]),
                "hits": {h["doc_id"]: float(h["score"]) for h in event.payload["hits"]},
                "included": {h["doc_id"]: True for h in event.payload["hits"]},
            }
        elif event.kind == "tool_call" and event.payload.get("tool_name") == "get_bill_status":
            pending_calls[event.payload["call_id"]] = \
                event.payload.get("arguments", {}).get("bill_id", "")
        elif event.kind == "tool_result" and event.payload.get("call_id") in pending_calls:
            bill_id = pending_calls.pop(event.payload["call_id"])
            payload = event.payload.get("payload") or {}
            if event.payload.get("outcome") == "ok" and isinstance(payload, dict):
                enacted[bill_id] = bool(payload.get("enacted", False))
            else:
                enacted.setdefault(bill_id, False)
        elif event.kind == "override":
            cluster = clusters.get(event.payload.get("cluster", ""))
            if cluster is None:
                continue
            if event.payload.get("threshold") is not None:
                cluster["threshold"] = float(event.payload["threshold"])
            for bill_id, included in (event.payload.get("bill_overrides") or {}).items():
                if bill_id in cluster["included"]:
                    cluster["included"][bill_id] = bool(included)

    gridlocked = 0
    for cluster in clusters.values():
        tau = cluster["threshold"]
        any_enacted = any(
            cluster["included"][doc_id] and enacted.get(doc_id, False)
            for doc_id, score in cluster["hits"].items()
            if score >= tau
        )
        if not any_enacted:
            gridlocked += 1
    total = len(clusters)
    return {
        "gridlocked_clusters": gridlocked,
        "total_clusters": total,
        "score": compute_gridlock_score(gridlocked, total) if total else None,
    }


# --- series exports -------------------------------------------------------------

def series_to_csv(results: list[GridlockResult]) -> str:
    lines = ["congress,score"]
    lines.extend(f"{r.congress},{r.score}" for r in results)
    return "\n".join(lines) + "\n"


def series_to_svg(results: list[GridlockResult], width: int = 640, height: int = 360) -> str:
    """Plain SVG bar chart of score per Congress."""
    if not results:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"/>'
    margin = 40
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin
    bar_w = plot_w / len(results) * 0.7
    gap = plot_w / len(results)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
    ]
    for i, r in enumerate(results):
        bar_h = r.score * plot_h
        x = margin + i * gap + (gap - bar_w) / 2
        y = height - margin - bar_h
        parts.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" '
                     f'height="{bar_h:.1f}" fill="#4472a8"/>')
        parts.append(f'<text x="{x + bar_w / 2:.1f}" y="{height - margin + 16}" '
                     f'text-anchor="middle" font-size="12">{r.congress}</text>')
        parts.append(f'<text x="{x + bar_w / 2:.1f}" y="{y - 4:.1f}" '
                     f'text-anchor="middle" font-size="11">{r.score:g}</text>')
    parts.append("</svg>")
    return "".join(parts)
