"""HTTP clients for the bill-data API and the article-archive API.

Both clients run over a pluggable transport. CassetteTransport replays
committed request/response recordings (one JSON file per request, keyed by
a hash of method+path+query) so nothing here ever needs live credentials.
Retries: up to 3 re-attempts on 429/5xx with 1s/2s/4s backoff; a per-request
timeout (default 30s) always applies on the live transport.

Cassette file schema: {"status": int, "headers": {...}, "body": <json>} or
{"responses": [<that shape>, ...]} consumed in order for scripted sequences.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any
from urllib.parse import urlencode

from .errors import ToolError, TransportError
from .models import BillId, BillRecord, MemberRecord

RETRY_DELAYS = (1.0, 2.0, 4.0)


@dataclass(frozen=True)
class Response:
    status: int
    headers: dict[str, str]
    body: Any


def cassette_key(method: str, path: str, query: dict[str, Any] | None) -> str:
    canon = f"{method.upper()} {path}?{urlencode(sorted((query or {}).items()))}"
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:24]


class CassetteTransport:
    """Replays recorded responses from a directory of JSON files."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._cursors: dict[str, int] = {}
        self._lock = threading.Lock()

    def request(self, method: str, path: str, query: dict[str, Any] | None = None,
                timeout: float = 30.0) -> Response:
        key = cassette_key(method, path, query)
        file = self.directory / f"{key}.json"
        if not file.exists():
            raise TransportError(
                f"no cassette for {method.upper()} {path} (expected {file})")
        doc = json.loads(file.read_text(encoding="utf-8"))
        if "responses" in doc:
            with self._lock:
                idx = self._cursors.get(key, 0)
                entries = doc["responses"]
                entry = entries[min(idx, len(entries) - 1)]
                self._cursors[key] = idx + 1
        else:
            entry = doc
        return Response(status=int(entry["status"]),
                        headers=dict(entry.get("headers", {})),
                        body=entry.get("body"))

    @staticmethod
    def record_path(directory: str | Path, method: str, path: str,
                    query: dict[str, Any] | None = None) -> Path:
        return Path(directory) / f"{cassette_key(method, path, query)}.json"


class LiveTransport:
    def __init__(self, base_url: str, api_key: str | None = None,
                 key_param: str = "api_key", session=None):
        import requests

        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.key_param = key_param
        self._session = session or requests.Session()

    def request(self, method: str, path: str, query: dict[str, Any] | None = None,
                timeout: float = 30.0) -> Response:
        params = dict(query or {})
        if self.api_key:
            params[self.key_param] = self.api_key
        try:
            resp = self._session.request(method, f"{self.base_url}{path}",
                                         params=params, timeout=timeout)
        except Exception as exc:
            raise TransportError(f"{method} {path} failed: {exc}") from exc
        try:
            body = resp.json()
        except ValueError:
            body = resp.text
        return Response(status=resp.status_code, headers=dict(resp.headers), body=body)


class RateLimiter:
    """Process-wide token bucket; clock injectable for tests."""

    def __init__(self, requests_per_minute: int, clock=time.monotonic, sleep=time.sleep):
        if requests_per_minute < 1:
            raise ValueError("requests_per_minute must be >= 1")
        self.capacity = float(requests_per_minute)
        self.rate = requests_per_minute / 60.0
        self._tokens = float(requests_per_minute)
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            while True:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                self._sleep((1.0 - self._tokens) / self.rate)


class ApiClient:
    """Transport + retry policy shared by both concrete clients."""

    def __init__(self, transport, sleep=time.sleep, timeout: float = 30.0,
                 rate_limiter: RateLimiter | None = None, tracer=None, scope_id: str = ""):
        self.transport = transport
        self.timeout = timeout
        self._sleep = sleep
        self._limiter = rate_limiter
        self.tracer = tracer
        self.scope_id = scope_id

    def get(self, path: str, query: dict[str, Any] | None = None) -> Response:
        last: Response | Exception | None = None
        for attempt, delay in enumerate((0.0,) + RETRY_DELAYS):
            if delay:
                self._sleep(delay)
                if self.tracer is not None:
                    self.tracer.record(self.scope_id, "retrieval", {
                        "event": "retry", "path": path, "attempt": attempt, "delay_s": delay,
                    })
            if self._limiter is not None:
                self._limiter.acquire()
            try:
                resp = self.transport.request("GET", path, query, timeout=self.timeout)
            except TransportError as exc:
                last = exc
                continue
            if resp.status == 429 or resp.status >= 500:
                last = resp
                continue
            return resp
        if isinstance(last, Response):
            raise TransportError(f"GET {path} failed after retries: HTTP {last.status}")
        raise TransportError(f"GET {path} failed after retries: {last}")


class CongressApiClient:
    """bill/member endpoints: /bill/:congress/:billType/:billNumber etc."""

    def __init__(self, client: ApiClient):
        self.client = client

    def get_bill_details(self, bill_id: BillId) -> BillRecord:
        path = f"/bill/{bill_id.congress}/{bill_id.bill_type}/{bill_id.bill_number}"
        resp = self.client.get(path)
        if resp.status == 404:
            raise ToolError("not_found", f"bill {bill_id.render()} not found")
        body = resp.body or {}
        try:
            bill = body["bill"]
            return BillRecord(
                id=bill_id,
                title=bill["title"],
                summary=bill.get("summary", ""),
                introduced_date=bill["introduced_date"],
                sponsor_bioguide_ids=tuple(bill.get("sponsor_bioguide_ids", [])),
                enacted=bool(bill.get("enacted", False)),
                status_text=bill.get("status_text", ""),
            )
        except (KeyError, TypeError) as exc:
            raise ToolError("decode_error", f"unexpected bill payload shape: {exc}",
                            raw=body) from exc

    def get_bill_actions(self, bill_id: BillId) -> list[dict[str, str]]:
        """Drains pagination fully; actions returned in chronological order."""
        path = f"/bill/{bill_id.congress}/{bill_id.bill_type}/{bill_id.bill_number}/actions"
        actions: list[dict[str, str]] = []
        offset = 0
        while True:
            resp = self.client.get(path, {"offset": offset} if offset else None)
            if resp.status == 404:
                raise ToolError("not_found", f"bill {bill_id.render()} not found")
            body = resp.body or {}
            try:
                page = body["actions"]
            except (KeyError, TypeError) as exc:
                raise ToolError("decode_error", f"unexpected actions payload: {exc}",
                                raw=body) from exc
            actions.extend({"date": a["date"], "action_text": a["action_text"]} for a in page)
            pagination = body.get("pagination") or {}
            if not pagination.get("next"):
                break
            offset += len(page)
        actions.sort(key=lambda a: a["date"])
        return actions

    def get_member_info(self, bioguide_id: str) -> MemberRecord:
        resp = self.client.get(f"/member/{bioguide_id}")
        if resp.status == 404:
            raise ToolError("not_found", f"member {bioguide_id!r} not found")
        body = resp.body or {}
        try:
            member = body["member"]
            return MemberRecord(
                bioguide_id=bioguide_id,
                name=member["name"],
                state=member["state"],
                chamber=member["chamber"],
                terms=tuple((int(t["congress"]), t["party"]) for t in member["terms"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ToolError("decode_error", f"unexpected member payload: {exc}",
                            raw=body) from exc


class ArchiveApiClient:
    """Month-granular article archive: GET /archive/:year/:month."""

    def __init__(self, client: ApiClient):
        self.client = client

    def fetch_article_archive(self, year: int, month: int) -> list[dict[str, str]]:
        if not 1 <= month <= 12:
            raise ValueError(f"month must be in 1..12, got {month}")
        resp = self.client.get(f"/archive/{year}/{month}")
        if resp.status == 401 or resp.status == 403:
            raise ToolError("configuration_error",
                            "archive API rejected credentials; set ARCHIVE_API_KEY")
        body = resp.body or {}
        try:
            return [
                {
                    "headline": a["headline"],
                    "abstract": a.get("abstract", ""),
                    "pub_date": a.get("pub_date", ""),
                    "url": a["url"],
                }
                for a in body["articles"]
            ]
        except (KeyError, TypeError) as exc:
            raise ToolError("decode_error", f"unexpected archive payload: {exc}") from exc


class WebSearchStub:
    """Pluggable web-search surface; no live integration, returns a structured
    unavailable marker so the agent can move on."""

    def search(self, query: str) -> dict[str, Any]:
        return {"available": False, "message": "web search is not configured", "query": query}


def build_congress_client(cassette_dir: str | Path | None = None,
                          base_url: str = "https://api.congress.example/v3",
                          sleep=time.sleep, tracer=None, scope_id: str = "") -> CongressApiClient:
    """Cassette mode when no CONGRESS_API_KEY is present, live otherwise."""
    api_key = os.environ.get("CONGRESS_API_KEY")
    if cassette_dir is not None or not api_key:
        if cassette_dir is None:
            raise ValueError("no CONGRESS_API_KEY and no cassette directory given")
        transport = CassetteTransport(cassette_dir)
    else:
        transport = LiveTransport(base_url, api_key=api_key)
    return CongressApiClient(ApiClient(transport, sleep=sleep, tracer=tracer, scope_id=scope_id))


def build_archive_client(cassette_dir: str | Path | None = None,
                         base_url: str = "https://api.archive.example/v1",
                         requests_per_minute: int = 10,
                         sleep=time.sleep, clock=time.monotonic) -> ArchiveApiClient:
    api_key = os.environ.get("ARCHIVE_API_KEY")
    if cassette_dir is not None or not api_key:
        if cassette_dir is None:
            raise ValueError("no ARCHIVE_API_KEY and no cassette directory given")
        transport = CassetteTransport(cassette_dir)
        limiter = None  # replay is offline; no budget applies
    else:
        transport = LiveTransport(base_url, api_key=api_key)
        limiter = RateLimiter(requests_per_minute, clock=clock, sleep=sleep)
    return ArchiveApiClient(ApiClient(transport, sleep=sleep, rate_limiter=limiter))
