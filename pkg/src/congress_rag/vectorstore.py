"""Embedding storage and exact cosine-similarity search.

Collections persist to a single append-log file (magic "AVEC1") with an
in-memory index rebuilt on open. Search is an exhaustive scan: vectors are
stored as float32 and similarities accumulated in float64, so results are
exactly reproducible and easy to cross-check against a brute-force oracle.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .errors import DimensionMismatchError, UnknownCollectionError, ZeroNormError
from .models import EmbeddedDocument

MAGIC = b"AVEC1"


def cosine_similarity(a, b) -> float:
    """dot(a,b) / (|a||b|), computed in float64."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise DimensionMismatchError(f"vector lengths differ: {va.shape[0]} vs {vb.shape[0]}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("cosine similarity undefined for zero-norm vectors")
    return float(va @ vb) / (na * nb)


@dataclass(frozen=True)
class SearchHit:
    doc_id: str
    score: float
    metadata: dict[str, str]
    text: str

    def to_json(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "score": self.score,
            "metadata": dict(self.metadata),
            "text": self.text,
        }


class VectorCollection:
    """A named set of embedded documents with a fixed dimension.

    Single-writer contract: concurrent readers are fine, writes must be
    serialized by the caller. `path=None` keeps the collection in memory.
    """

    def __init__(self, name: str, dimension: int, path: str | Path | None = None):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.name = name
        self.dimension = dimension
        self.path = Path(path) if path is not None else None
        self._docs: dict[str, EmbeddedDocument] = {}
        if self.path is not None and self.path.exists():
            self._load()
        elif self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("wb") as f:
                f.write(MAGIC + struct.pack("<I", dimension))

    def __len__(self) -> int:
        return len(self._docs)

    def get(self, doc_id: str) -> EmbeddedDocument | None:
        return self._docs.get(doc_id)

    def upsert(self, doc: EmbeddedDocument) -> None:
        if len(doc.vector) != self.dimension:
            raise DimensionMismatchError(
                f"document {doc.doc_id!r} has dimension {len(doc.vector)}, collection expects {self.dimension}")
        vec32 = np.asarray(doc.vector, dtype=np.float32)
        if float(np.linalg.norm(vec32.astype(np.float64))) == 0.0:
            raise ZeroNormError(f"document {doc.doc_id!r} has zero-norm vector")
        stored = EmbeddedDocument(
            doc_id=doc.doc_id,
            collection=self.name,
            text=doc.text,
            vector=tuple(float(x) for x in vec32),
            metadata=dict(doc.metadata),
        )
        if self.path is not None:
            self._append_record(stored, vec32)
        self._docs[doc.doc_id] = stored

    def upsert_many(self, docs: Iterable[EmbeddedDocument]) -> int:
        n = 0
        for doc in docs:
            self.upsert(doc)
            n += 1
        return n

    def search(self, query_vector, top_k: int = 10, threshold: float = -1.0,
               metadata_filter: dict[str, str] | None = None) -> list[SearchHit]:
        """Exhaustive scan, (score desc, doc_id asc) order, truncated to top_k."""
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not -1.0 <= threshold <= 1.0:
            raise ValueError("threshold must lie in [-1, 1]")
        q = np.asarray(query_vector, dtype=np.float64)
        if q.shape[0] != self.dimension:
            raise DimensionMismatchError(
                f"query has dimension {q.shape[0]}, collection expects {self.dimension}")
        qn = float(np.linalg.norm(q))
        if qn == 0.0:
            raise ZeroNormError("query vector has zero norm")

        candidates = list(self._docs.values())
        if metadata_filter:
            candidates = [
                d for d in candidates
                if all(d.metadata.get(k) == v for k, v in metadata_filter.items())
            ]
        if not candidates:
            return []

        matrix = np.array([d.vector for d in candidates], dtype=np.float64)
        norms = np.linalg.norm(matrix, axis=1)
        scores = (matrix @ q) / (norms * qn)

        scored = [
            (float(s), d) for s, d in zip(scores, candidates)
            if float(s) >= threshold
        ]
        scored.sort(key=lambda pair: (-pair[0], pair[1].doc_id))
        return [
            SearchHit(doc_id=d.doc_id, score=s, metadata=dict(d.metadata), text=d.text)
            for s, d in scored[:top_k]
        ]

    # --- persistence -----------------------------------------------------

    def _append_record(self, doc: EmbeddedDocument, vec32: np.ndarray) -> None:
        header = json.dumps({
            "doc_id": doc.doc_id,
            "collection": doc.collection,
            "metadata": doc.metadata,
            "text": doc.text,
        }, ensure_ascii=False).encode("utf-8")
        with self.path.open("ab") as f:
            f.write(struct.pack("<I", len(header)))
            f.write(header)
            f.write(vec32.astype("<f4").tobytes())

    def _load(self) -> None:
        raw = self.path.read_bytes()
        if raw[:5] != MAGIC:
            raise ValueError(f"{self.path} is not a vector collection file")
        (dim,) = struct.unpack_from("<I", raw, 5)
        if dim != self.dimension:
            raise DimensionMismatchError(
                f"{self.path} holds dimension {dim}, expected {self.dimension}")
        offset = 9
        vec_bytes = 4 * dim
        while offset < len(raw):
            (hlen,) = struct.unpack_from("<I", raw, offset)
            offset += 4
            header = json.loads(raw[offset:offset + hlen].decode("utf-8"))
            offset += hlen
            vec = np.frombuffer(raw[offset:offset + vec_bytes], dtype="<f4")
            offset += vec_bytes
            self._docs[header["doc_id"]] = EmbeddedDocument(
                doc_id=header["doc_id"],
                collection=header["collection"],
                text=header["text"],
                vector=tuple(float(x) for x in vec),
                metadata=header.get("metadata", {}),
            )

    def export_jsonl(self, path: str | Path) -> int:
        path = Path(path)
        with path.open("w", encoding="utf-8") as f:
            for doc_id in sorted(self._docs):
                f.write(json.dumps(self._docs[doc_id].to_json(), ensure_ascii=False) + "\n")
        return len(self._docs)

    def import_jsonl(self, path: str | Path) -> int:
        n = 0
        with Path(path).open(encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    self.upsert(EmbeddedDocument.from_json(json.loads(line)))
                    n += 1
        return n


class VectorStore:
    """Registry of named collections."""

    def __init__(self):
        self._collections: dict[str, VectorCollection] = {}

    def create(self, name: str, dimension: int, path: str | Path | None = None) -> VectorCollection:
        coll = VectorCollection(name, dimension, path)
        self._collections[name] = coll
        return coll

    def get(self, name: str) -> VectorCollection:
        if name not in self._collections:
            raise UnknownCollectionError(name)
        return self._collections[name]

    def __contains__(self, name: str) -> bool:
        return name in self._collections
