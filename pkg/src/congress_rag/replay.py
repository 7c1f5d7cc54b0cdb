"""Deterministic replay environments built from committed fixture directories.

Layout, one subdirectory per Congress:

    <root>/<congress>/
        provider.jsonl    scripted chat-provider steps (step-1 exchange)
        embeddings.json   recorded text -> vector map for the query embedder
        bills.jsonl       EmbeddedDocument JSONL for the bills collection
        articles.jsonl    EmbeddedDocument JSONL for the articles collection
        bill_status.csv   bill_id,enacted,status_text rows

Everything loads into in-memory stores; replay needs no network and no
credentials.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .agent.providers import ScriptedProvider
from .embeddings import RecordedEmbedder
from .errors import NotFoundError
from .pipeline import GridlockPipeline, PipelineConfig
from .relational import RelationalStore
from .tools import build_registry
from .trace import TraceRecorder
from .vectorstore import VectorStore

REPLAY_DIMENSION = 12


def list_congresses(root: str | Path) -> list[int]:
    return sorted(int(p.name) for p in Path(root).iterdir()
                  if p.is_dir() and p.name.isdigit())


def build_replay_pipeline(root: str | Path, runs_dir: str | Path,
                          trace_dir: str | Path,
                          config: PipelineConfig | None = None) -> GridlockPipeline:
    root = Path(root)
    congresses = list_congresses(root)
    if not congresses:
        raise NotFoundError(f"no replay fixtures under {root}")

    recordings: dict[str, list[float]] = {}
    vector_store = VectorStore()
    bills = vector_store.create("bills", REPLAY_DIMENSION)
    articles = vector_store.create("articles", REPLAY_DIMENSION)
    relational = RelationalStore()

    for congress in congresses:
        cdir = root / str(congress)
        for text, vec in json.loads((cdir / "embeddings.json").read_text("utf-8")).items():
            if text in recordings and recordings[text] != vec:
                raise ValueError(f"conflicting recorded embeddings for {text[:60]!r}")
            recordings[text] = vec
        bills.import_jsonl(cdir / "bills.jsonl")
        articles.import_jsonl(cdir / "articles.jsonl")
        with (cdir / "bill_status.csv").open(encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                relational.upsert_bill_status(
                    row["bill_id"].strip(),
                    row["enacted"].strip().lower() in ("1", "true", "t", "yes"),
                    row["status_text"].strip(),
                )

    embedder = RecordedEmbedder(recordings)
    registry = build_registry(vector_store, embedder, relational)
    tracer = TraceRecorder(trace_dir)

    def provider_factory(congress: int) -> ScriptedProvider:
        path = root / str(congress) / "provider.jsonl"
        if not path.exists():
            raise NotFoundError(f"no provider cassette for congress {congress}: {path}")
        return ScriptedProvider.from_jsonl(path)

    return GridlockPipeline(vector_store, embedder, registry, provider_factory,
                            tracer, runs_dir, config=config)
