"""Append-only JSONL trace log, one file per scope.

Every externally visible action (LLM exchange, tool dispatch, retrieval,
override, step boundary) is appended before the caller proceeds. Events are
never updated or deleted; exports are reproducible for a finished scope.
"""

from __future__ import annotations

import html
import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator

from .errors import NotFoundError

EVENT_KINDS = frozenset({
    "llm_request", "llm_response", "tool_call", "tool_result",
    "retrieval", "override", "step_boundary", "error",
})

# Payloads larger than this (JSON-encoded) are elided with an explicit marker.
PAYLOAD_BYTE_BUDGET = 64 * 1024


def truncate_payload(payload: Any, byte_budget: int = PAYLOAD_BYTE_BUDGET) -> Any:
    """Replace oversized payloads with an honest truncation marker."""
    encoded = json.dumps(payload, ensure_ascii=False)
    if len(encoded.encode("utf-8")) <= byte_budget:
        return payload
    return {
        "truncated": True,
        "original_bytes": len(encoded.encode("utf-8")),
        "head": encoded[: byte_budget // 2],
    }


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    timestamp: str
    scope_id: str
    kind: str
    payload: Any
    latency_ms: int | None = None

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "v": 1,
            "seq": self.seq,
            "timestamp": self.timestamp,
            "scope_id": self.scope_id,
            "kind": self.kind,
            "payload": self.payload,
        }
        if self.latency_ms is not None:
            doc["latency_ms"] = self.latency_ms
        return doc

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "TraceEvent":
        return cls(
            seq=int(obj["seq"]),
            timestamp=obj["timestamp"],
            scope_id=obj["scope_id"],
            kind=obj["kind"],
            payload=obj["payload"],
            latency_ms=obj.get("latency_ms"),
        )


class TraceRecorder:
    """Per-scope append-only event log under a trace directory."""

    def __init__(self, trace_dir: str | Path):
        self.trace_dir = Path(trace_dir)
        self.trace_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._seqs: dict[str, int] = {}
        self._meta_lock = threading.Lock()

    def _scope_path(self, scope_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in scope_id)
        return self.trace_dir / f"{safe}.jsonl"

    def _scope_lock(self, scope_id: str) -> threading.Lock:
        with self._meta_lock:
            return self._locks.setdefault(scope_id, threading.Lock())

    def record(self, scope_id: str, kind: str, payload: Any,
               latency_ms: int | None = None) -> int:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown trace event kind {kind!r}")
        payload = truncate_payload(payload)
        with self._scope_lock(scope_id):
            seq = self._seqs.get(scope_id)
            if seq is None:
                seq = sum(1 for _ in self.events(scope_id)) if self._scope_path(scope_id).exists() else 0
            seq += 1
            event = TraceEvent(
                seq=seq,
                timestamp=datetime.now(timezone.utc).isoformat(),
                scope_id=scope_id,
                kind=kind,
                payload=payload,
                latency_ms=latency_ms,
            )
            with self._scope_path(scope_id).open("a", encoding="utf-8") as f:
                f.write(json.dumps(event.to_json(), ensure_ascii=False) + "\n")
                f.flush()
            self._seqs[scope_id] = seq
            return seq

    def events(self, scope_id: str) -> Iterator[TraceEvent]:
        path = self._scope_path(scope_id)
        if not path.exists():
            raise NotFoundError(f"unknown trace scope {scope_id!r}")
        with path.open(encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    yield TraceEvent.from_json(json.loads(line))

    def export(self, scope_id: str, fmt: str = "jsonl") -> str:
        """Render a scope as a jsonl document or a human-readable HTML audit."""
        events = list(self.events(scope_id))
        if fmt == "jsonl":
            return "".join(json.dumps(e.to_json(), ensure_ascii=False) + "\n" for e in events)
        if fmt == "html_report":
            return _html_report(scope_id, events)
        raise ValueError(f"unknown export format {fmt!r}")


class NullRecorder(TraceRecorder):
    """Recorder that keeps events in memory only; handy for unit tests."""

    def __init__(self):  # noqa: D107 - no directory
        self._events: dict[str, list[TraceEvent]] = {}
        self._locks = {}
        self._seqs = {}
        self._meta_lock = threading.Lock()

    def record(self, scope_id: str, kind: str, payload: Any,
               latency_ms: int | None = None) -> int:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown trace event kind {kind!r}")
        payload = truncate_payload(payload)
        with self._scope_lock(scope_id):
            events = self._events.setdefault(scope_id, [])
            seq = len(events) + 1
            events.append(TraceEvent(
                seq=seq,
                timestamp=datetime.now(timezone.utc).isoformat(),
                scope_id=scope_id,
                kind=kind,
                payload=payload,
                latency_ms=latency_ms,
            ))
            return seq

    def events(self, scope_id: str) -> Iterator[TraceEvent]:
        if scope_id not in self._events:
            raise NotFoundError(f"unknown trace scope {scope_id!r}")
        yield from self._events[scope_id]


def verify_scope(events: list[TraceEvent]) -> None:
    """Check gap-free sequencing and 1:1 tool_call/tool_result pairing."""
    for i, event in enumerate(events, start=1):
        if event.seq != i:
            raise ValueError(f"sequence gap at position {i}: found seq {event.seq}")
    calls = [e.payload.get("call_id") for e in events if e.kind == "tool_call"]
    results = [e.payload.get("call_id") for e in events if e.kind == "tool_result"]
    if sorted(calls) != sorted(results):
        raise ValueError("tool_call/tool_result call_ids do not pair 1:1")


def _html_report(scope_id: str, events: list[TraceEvent]) -> str:
    rows = []
    for e in events:
        payload = html.escape(json.dumps(e.payload, ensure_ascii=False, indent=2))
        rows.append(
            f"<tr class='kind-{e.kind}'><td>{e.seq}</td><td>{html.escape(e.timestamp)}</td>"
            f"<td>{e.kind}</td><td><pre>{payload}</pre></td></tr>"
        )
    return (
        "<!doctype html><html><head><meta charset='utf-8'>"
        f"<title>Trace {html.escape(scope_id)}</title>"
        "<style>table{border-collapse:collapse;font-family:monospace}"
        "td{border:1px solid #ccc;padding:4px;vertical-align:top}"
        ".kind-override td{background:#fff3cd}</style></head><body>"
        f"<h1>Trace audit: {html.escape(scope_id)}</h1>"
        "<table><tr><th>seq</th><th>time</th><th>kind</th><th>payload</th></tr>"
        + "".join(rows) + "</table></body></html>"
    )
