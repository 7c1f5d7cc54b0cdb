import time

import pytest
from fastapi.testclient import TestClient

from congress_rag.agent.providers import AssistantStep, ScriptedProvider
from congress_rag.errors import ProviderTimeoutError
from congress_rag.replay import build_replay_pipeline
from congress_rag.service import ServiceState, create_app

from conftest import REPLAY_ROOT


@pytest.fixture
def client(tmp_path):
    pipeline = build_replay_pipeline(REPLAY_ROOT, tmp_path / "runs", tmp_path / "trace")
    provider = ScriptedProvider([AssistantStep.of_text("hello there")],
                                repeat_last=True)
    state = ServiceState(pipeline, chat_provider=provider)
    return TestClient(create_app(state)), state


def start_and_wait(http, congress=113, no_review=False, headers=None):
    resp = http.post("/api/runs", json={"congress": congress, "no_review": no_review},
                     headers=headers or {})
    assert resp.status_code == 202
    run_id = resp.json()["run_id"]
    for _ in range(200):
        doc = http.get(f"/api/runs/{run_id}").json()
        if doc["state"] in ("awaiting_review", "finalized", "failed"):
            return run_id, doc
        time.sleep(0.02)
    raise AssertionError("run did not settle")


def test_run_lifecycle_and_review(client):
    http, _ = client
    run_id, doc = start_and_wait(http)
    assert doc["state"] == "awaiting_review"
    assert len(doc["cluster_reports"]) == 8

    clusters = http.get(f"/api/runs/{run_id}/clusters").json()
    immigration = next(c for c in clusters if c["cluster_name"] == "Immigration Reform")
    assert immigration["total_bills_found"] == 100
    assert immigration["included"]["113-s-1"] is True

    resp = http.patch(f"/api/runs/{run_id}/clusters/Immigration Reform",
                      json={"threshold": 0.9})
    assert resp.status_code == 200
    body = resp.json()
    assert body["cluster_report"]["total_bills_found"] == 0
    assert body["gridlock"]["total_clusters"] == 8

    final = http.post(f"/api/runs/{run_id}/finalize")
    assert final.status_code == 200
    assert final.json()["gridlocked_clusters"] == 5  # immigration now gridlocked

    # Finalizing twice conflicts.
    assert http.post(f"/api/runs/{run_id}/finalize").status_code == 409


def test_no_review_run_finalizes_itself(client):
    http, _ = client
    _, doc = start_and_wait(http, no_review=True)
    assert doc["state"] == "finalized"
    assert doc["result"]["score"] == 0.5


def test_idempotency_key_replays_response(client):
    http, _ = client
    headers = {"Idempotency-Key": "abc"}
    first = http.post("/api/runs", json={"congress": 113}, headers=headers).json()
    second = http.post("/api/runs", json={"congress": 113}, headers=headers).json()
    assert first == second
    third = http.post("/api/runs", json={"congress": 113},
                      headers={"Idempotency-Key": "other"}).json()
    assert third["run_id"] != first["run_id"]


def test_error_codes(client):
    http, _ = client
    assert http.get("/api/runs/run-404-nope").status_code == 404
    assert http.post("/api/runs", json={"congress": "x"}).status_code == 400
    assert http.post("/api/runs", json={}).status_code == 400
    run_id, _ = start_and_wait(http)
    resp = http.patch(f"/api/runs/{run_id}/clusters/No Such Cluster",
                      json={"threshold": 0.5})
    assert resp.status_code == 404
    resp = http.patch(f"/api/runs/{run_id}/clusters/Immigration Reform",
                      json={"threshold": 5.0})
    assert resp.status_code == 400


def test_gridlock_series_uses_latest_finalized_run(client):
    http, _ = client
    assert http.get("/api/gridlock?from=113&to=118").json() == []
    start_and_wait(http, congress=113, no_review=True)
    start_and_wait(http, congress=114, no_review=True)
    run_id, _ = start_and_wait(http, congress=113)  # stalls in review: excluded
    series = http.get("/api/gridlock?from=113&to=118").json()
    assert [(e["congress"], e["score"]) for e in series] == [(113, 0.5), (114, 0.1)]

    # Exclude the cluster's only enacted bill and finalize; the series now
    # reflects the newer run.
    clusters = http.get(f"/api/runs/{run_id}/clusters").json()
    immigration = next(c for c in clusters if c["cluster_name"] == "Immigration Reform")
    enacted_id = next(b["bill_id"] for b in immigration["bills"] if b["enacted"])
    http.patch(f"/api/runs/{run_id}/clusters/Immigration Reform",
               json={"bill_overrides": {enacted_id: False}})
    http.post(f"/api/runs/{run_id}/finalize")
    series = http.get("/api/gridlock?from=113&to=118").json()
    entry_113 = next(e for e in series if e["congress"] == 113)
    assert entry_113["score"] == 0.625
    assert entry_113["run_id"] == run_id

    assert http.get("/api/gridlock?from=114&to=114").json()[0]["congress"] == 114
    assert http.get("/api/gridlock?from=abc&to=118").status_code == 400


def test_sessions_and_trace(client):
    http, _ = client
    session_id = http.post("/api/sessions").json()["session_id"]
    resp = http.post(f"/api/sessions/{session_id}/messages", json={"text": "hi"})
    assert resp.status_code == 200
    assert resp.json()["kind"] == "answered"
    assert resp.json()["final_text"] == "hello there"

    trace = http.get(f"/api/sessions/{session_id}/trace")
    assert trace.status_code == 200
    assert len(trace.text.strip().splitlines()) == 2  # llm_request + llm_response

    assert http.post("/api/sessions/unknown/messages",
                     json={"text": "hi"}).status_code == 404
    assert http.post(f"/api/sessions/{session_id}/messages",
                     json={"text": ""}).status_code == 400


def test_provider_timeout_maps_to_504(tmp_path):
    class TimeoutProvider:
        def chat(self, messages, tool_definitions):
            raise ProviderTimeoutError("upstream took too long")

    pipeline = build_replay_pipeline(REPLAY_ROOT, tmp_path / "runs", tmp_path / "trace")
    state = ServiceState(pipeline, chat_provider=TimeoutProvider())
    http = TestClient(create_app(state), raise_server_exceptions=False)
    session_id = http.post("/api/sessions").json()["session_id"]
    resp = http.post(f"/api/sessions/{session_id}/messages", json={"text": "hi"})
    assert resp.status_code == 504


def test_run_trace_export(client):
    http, _ = client
    run_id, _ = start_and_wait(http, no_review=True)
    trace = http.get(f"/api/runs/{run_id}/trace")
    assert trace.status_code == 200
    kinds = {__import__("json").loads(line)["kind"]
             for line in trace.text.strip().splitlines()}
    assert {"llm_request", "llm_response", "retrieval", "tool_call",
            "tool_result", "step_boundary"} <= kinds
