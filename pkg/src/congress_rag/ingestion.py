"""Bulk pipelines that populate the stores.

Bill summaries and articles are normalized (HTML stripped, whitespace
collapsed), embedded in batches, and upserted into their collections;
CSV tables load into the relational store. All ingests are idempotent by
doc_id / truncate-and-load. Progress is reported as line-delimited JSON
events through an optional callback.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import re
from pathlib import Path
from typing import Callable, Iterable

from .errors import IngestionError
from .models import EmbeddedDocument
from .relational import RelationalStore
from .vectorstore import VectorCollection

log = logging.getLogger(__name__)

EMBED_BATCH_SIZE = 64

_TAG_RE = re.compile(r"<[^>]+>")
_WS_RE = re.compile(r"\s+")

# Terminal status markers that count as enacted when deriving the flag from
# bulk status dumps.
ENACTED_STATUS_MARKERS = {
    "became_law", "becamelaw", "enacted", "public_law", "signed_by_president",
}


def normalize_text(text: str) -> str:
    """Strip HTML tags and collapse whitespace; no further normalization."""
    return _WS_RE.sub(" ", _TAG_RE.sub(" ", text)).strip()


def _batches(items: list, size: int) -> Iterable[list]:
    for i in range(0, len(items), size):
        yield items[i:i + size]


def _emit(progress: Callable[[dict], None] | None, event: dict) -> None:
    if progress is not None:
        progress(event)


def ingest_bill_summaries(source_path: str | Path, collection: VectorCollection,
                          embedder, congress_range: tuple[int, int] | None = None,
                          batch_size: int = EMBED_BATCH_SIZE,
                          progress: Callable[[dict], None] | None = None) -> dict:
    """Load a JSONL file of {bill_id, summary, [title]} records into `bills`."""
    records = []
    skipped = 0
    with Path(source_path).open(encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                bill_id = raw["bill_id"]
                congress = int(bill_id.split("-", 1)[0])
                summary = normalize_text(raw["summary"])
            except (json.JSONDecodeError, KeyError, ValueError, IndexError) as exc:
                log.warning("skipping unparsable bill record at line %d: %s", line_no, exc)
                skipped += 1
                continue
            if congress_range and not congress_range[0] <= congress <= congress_range[1]:
                continue
            records.append((bill_id, congress, summary))

    embedded = 0
    for batch in _batches(records, batch_size):
        vectors = embedder.embed([summary for _, _, summary in batch])
        for (bill_id, congress, summary), vec in zip(batch, vectors):
            collection.upsert(EmbeddedDocument(
                doc_id=bill_id,
                collection=collection.name,
                text=summary,
                vector=tuple(vec),
                metadata={"congress": str(congress), "bill_id": bill_id},
            ))
            embedded += 1
        _emit(progress, {"event": "batch", "collection": collection.name, "done": embedded})
    _emit(progress, {"event": "done", "bills_embedded": embedded, "skipped": skipped})
    return {"bills_embedded": embedded, "skipped": skipped}


def article_doc_id(url: str) -> str:
    return "article-" + hashlib.sha256(url.encode("utf-8")).hexdigest()[:16]


def ingest_articles(archive_client, collection: VectorCollection, embedder,
                    year_range: tuple[int, int],
                    batch_size: int = EMBED_BATCH_SIZE,
                    progress: Callable[[dict], None] | None = None) -> dict:
    """Pull every (year, month) in range from the archive client and embed
    "headline + abstract". Duplicate urls across months are stored once."""
    seen: dict[str, dict] = {}
    skipped = 0
    for year in range(year_range[0], year_range[1] + 1):
        for month in range(1, 13):
            for art in archive_client.fetch_article_archive(year, month):
                url = art.get("url")
                if not url or not art.get("headline"):
                    skipped += 1
                    continue
                if url not in seen:
                    seen[url] = {**art, "year": year, "month": month}

    articles = list(seen.values())
    embedded = 0
    for batch in _batches(articles, batch_size):
        texts = [normalize_text(f"{a['headline']} {a.get('abstract', '')}") for a in batch]
        vectors = embedder.embed(texts)
        for art, text, vec in zip(batch, texts, vectors):
            collection.upsert(EmbeddedDocument(
                doc_id=article_doc_id(art["url"]),
                collection=collection.name,
                text=text,
                vector=tuple(vec),
                metadata={
                    "year": str(art["year"]),
                    "month": str(art["month"]),
                    "url": art["url"],
                },
            ))
            embedded += 1
        _emit(progress, {"event": "batch", "collection": collection.name, "done": embedded})
    _emit(progress, {"event": "done", "articles_embedded": embedded, "skipped": skipped})
    return {"articles_embedded": embedded, "skipped": skipped}


def ingest_bill_status(source_path: str | Path, store: RelationalStore,
                       progress: Callable[[dict], None] | None = None) -> int:
    """Load a CSV of (bill_id, status) into bill_status, deriving `enacted`
    from terminal status markers. Unknown markers load as not-enacted."""
    rows = []
    unknown = 0
    with Path(source_path).open(encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        missing = [c for c in ("bill_id", "status") if c not in header]
        if missing:
            raise IngestionError(
                f"{source_path}: header is missing columns: {', '.join(missing)}")
        for raw in reader:
            status = raw["status"].strip()
            marker = status.lower().replace(" ", "_")
            enacted = marker in ENACTED_STATUS_MARKERS
            if not enacted and marker not in {
                "introduced", "in_committee", "passed_house", "passed_senate",
                "failed", "vetoed", "not_enacted",
            }:
                log.warning("unknown status marker %r for %s; loading as not enacted",
                            status, raw["bill_id"])
                unknown += 1
            rows.append((raw["bill_id"].strip(), enacted, status))

    for bill_id, enacted, status in rows:
        store.upsert_bill_status(bill_id, enacted, status)
    _emit(progress, {"event": "done", "rows": len(rows), "unknown_status": unknown})
    return len(rows)
