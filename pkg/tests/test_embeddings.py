import json
import math

import pytest

from congress_rag.embeddings import HashEmbedder, HttpEmbedder, RecordedEmbedder
from congress_rag.errors import ProviderError


def test_hash_embedder_is_deterministic_and_normalized():
    embedder = HashEmbedder(dimension=32)
    a = embedder.embed(["gun control legislation"])[0]
    b = embedder.embed(["gun control legislation"])[0]
    assert a == b
    assert math.isclose(math.sqrt(sum(x * x for x in a)), 1.0, rel_tol=1e-12)
    assert embedder.embed(["something else"])[0] != a


def test_hash_embedder_seed_changes_vectors():
    text = ["same text"]
    assert HashEmbedder(8, seed="v1").embed(text) != HashEmbedder(8, seed="v2").embed(text)


def test_hash_embedder_tokenless_input_still_valid():
    vec = HashEmbedder(8).embed(["!!! ???"])[0]
    assert sum(x * x for x in vec) > 0


def test_hash_embedder_rejects_bad_args():
    with pytest.raises(ValueError):
        HashEmbedder(0)
    with pytest.raises(ValueError):
        HashEmbedder(8).embed([])


def test_recorded_embedder_replays_and_falls_back():
    recorded = RecordedEmbedder({"known": [1.0, 0.0]},
                                fallback=HashEmbedder(dimension=2))
    assert recorded.embed(["known"])[0] == (1.0, 0.0)
    assert len(recorded.embed(["unknown"])[0]) == 2


def test_recorded_embedder_without_fallback_errors_on_unknown():
    recorded = RecordedEmbedder({"known": [1.0, 0.0]})
    with pytest.raises(ProviderError, match="unknown"):
        recorded.embed(["unknown text here"])


def test_recorded_embedder_rejects_mixed_dimensions():
    with pytest.raises(ValueError):
        RecordedEmbedder({"a": [1.0], "b": [1.0, 0.0]})


def test_recorded_embedder_from_file(tmp_path):
    path = tmp_path / "rec.json"
    path.write_text(json.dumps({"t": [0.5, 0.5]}), encoding="utf-8")
    embedder = RecordedEmbedder.from_file(path)
    assert embedder.dimension == 2
    assert embedder.embed(["t"])[0] == (0.5, 0.5)


class _FakeResponse:
    def __init__(self, status_code, body):
        self.status_code = status_code
        self._body = body

    def json(self):
        return self._body

    def raise_for_status(self):
        pass


class _FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)

    def post(self, *args, **kwargs):
        return self.responses.pop(0)


def test_http_embedder_retries_then_returns_vectors():
    session = _FakeSession([
        _FakeResponse(429, {}),
        _FakeResponse(200, {"data": [{"embedding": [0.1, 0.2]}]}),
    ])
    delays = []
    embedder = HttpEmbedder("http://x", "m", dimension=2, session=session,
                            sleep=delays.append)
    assert embedder.embed(["t"]) == [(0.1, 0.2)]
    assert delays == [1.0]


def test_http_embedder_exhausts_retries():
    session = _FakeSession([_FakeResponse(500, {})] * 4)
    embedder = HttpEmbedder("http://x", "m", dimension=2, session=session,
                            sleep=lambda s: None)
    with pytest.raises(ProviderError):
        embedder.embed(["t"])
