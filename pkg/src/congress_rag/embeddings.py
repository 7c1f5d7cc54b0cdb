"""Embedding providers.

Three interchangeable implementations:
  * HashEmbedder   - deterministic offline embedder (seeded token-hash bag,
                     L2-normalized); default for tests and local work.
  * RecordedEmbedder - replays vectors recorded for exact texts; used by the
                     committed replay fixtures.
  * HttpEmbedder   - JSON-over-HTTP client with backoff retries.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ProviderError

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class HashEmbedder:
    """Deterministic bag-of-hashed-tokens embedding, unit L2 norm."""

    def __init__(self, dimension: int = 64, seed: str = "v1"):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.seed = seed

    def embed(self, texts: Sequence[str]) -> list[tuple[float, ...]]:
        if not texts:
            raise ValueError("texts must be non-empty")
        return [self._embed_one(t) for t in texts]

    def _embed_one(self, text: str) -> tuple[float, ...]:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            digest = hashlib.sha256(f"{self.seed}:{token}".encode()).digest()
            idx = int.from_bytes(digest[:4], "little") % self.dimension
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vec[idx] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            # Tokenless input still gets a valid direction so search never sees
            # a zero vector.
            vec[0] = 1.0
            norm = 1.0
        return tuple(float(x) for x in vec / norm)


class RecordedEmbedder:
    """Replays exact vectors for known texts; optional fallback for the rest."""

    def __init__(self, recordings: dict[str, Sequence[float]], fallback=None):
        self._recordings = {k: tuple(float(x) for x in v) for k, v in recordings.items()}
        self._fallback = fallback
        dims = {len(v) for v in self._recordings.values()}
        if len(dims) > 1:
            raise ValueError("recorded vectors disagree on dimension")
        self.dimension = dims.pop() if dims else (fallback.dimension if fallback else 0)

    @classmethod
    def from_file(cls, path: str | Path, fallback=None) -> "RecordedEmbedder":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data, fallback=fallback)

    def embed(self, texts: Sequence[str]) -> list[tuple[float, ...]]:
        if not texts:
            raise ValueError("texts must be non-empty")
        out = []
        for t in texts:
            if t in self._recordings:
                out.append(self._recordings[t])
            elif self._fallback is not None:
                out.append(self._fallback.embed([t])[0])
            else:
                raise ProviderError(f"no recorded embedding for text {t[:80]!r}")
        return out


class HttpEmbedder:
    """Minimal embeddings-API client: POST {model, input} -> {data:[{embedding}]}."""

    RETRY_DELAYS = (1.0, 2.0, 4.0)

    def __init__(self, base_url: str, model: str, dimension: int,
                 token_env: str = "AGENT_PROVIDER_TOKEN",
                 session=None, sleep=time.sleep):
        import requests

        self.base_url = base_url.rstrip("/")
        self.model = model
        self.dimension = dimension
        self.token_env = token_env
        self._session = session or requests.Session()
        self._sleep = sleep

    def embed(self, texts: Sequence[str]) -> list[tuple[float, ...]]:
        if not texts:
            raise ValueError("texts must be non-empty")
        headers = {}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        last_error = None
        for attempt, delay in enumerate((0.0,) + self.RETRY_DELAYS):
            if delay:
                self._sleep(delay)
            try:
                resp = self._session.post(
                    f"{self.base_url}/embeddings",
                    json={"model": self.model, "input": list(texts)},
                    headers=headers,
                    timeout=30,
                )
            except Exception as exc:  # transport-level failure
                last_error = exc
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = RuntimeError(f"HTTP {resp.status_code}")
                continue
            resp.raise_for_status()
            data = resp.json()["data"]
            return [tuple(float(x) for x in item["embedding"]) for item in data]
        raise ProviderError(f"embedding request failed after retries: {last_error}")
