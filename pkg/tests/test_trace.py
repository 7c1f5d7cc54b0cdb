import json
import threading

import pytest

from congress_rag.errors import NotFoundError
from congress_rag.trace import (NullRecorder, TraceEvent, TraceRecorder,
                                truncate_payload, verify_scope)


def test_events_are_appended_with_gap_free_seq(tmp_path):
    recorder = TraceRecorder(tmp_path)
    for i in range(5):
        recorder.record("scope", "error", {"i": i})
    events = list(recorder.events("scope"))
    assert [e.seq for e in events] == [1, 2, 3, 4, 5]
    verify_scope(events)


def test_seq_continues_after_reopen(tmp_path):
    TraceRecorder(tmp_path).record("scope", "error", {"i": 0})
    reopened = TraceRecorder(tmp_path)
    assert reopened.record("scope", "error", {"i": 1}) == 2
    verify_scope(list(reopened.events("scope")))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        TraceRecorder(tmp_path).record("scope", "bogus", {})


def test_unknown_scope_raises(tmp_path):
    with pytest.raises(NotFoundError):
        list(TraceRecorder(tmp_path).events("missing"))


def test_truncation_marker_for_oversized_payload(tmp_path):
    recorder = TraceRecorder(tmp_path)
    recorder.record("scope", "retrieval", {"blob": "x" * (70 * 1024)})
    event = next(recorder.events("scope"))
    assert event.payload["truncated"] is True
    assert event.payload["original_bytes"] > 64 * 1024
    # Small payloads pass through untouched.
    assert truncate_payload({"a": 1}) == {"a": 1}


def test_export_jsonl_round_trips(tmp_path):
    recorder = TraceRecorder(tmp_path)
    recorder.record("scope", "tool_call", {"call_id": "c1"})
    recorder.record("scope", "tool_result", {"call_id": "c1"}, latency_ms=7)
    lines = recorder.export("scope", "jsonl").splitlines()
    assert len(lines) == 2
    restored = [TraceEvent.from_json(json.loads(l)) for l in lines]
    assert restored == list(recorder.events("scope"))
    assert restored[1].latency_ms == 7
    assert json.loads(lines[0])["v"] == 1


def test_export_html_report(tmp_path):
    recorder = TraceRecorder(tmp_path)
    recorder.record("scope", "override", {"cluster": "X", "threshold": 0.5})
    html_doc = recorder.export("scope", "html_report")
    assert html_doc.startswith("<!doctype html>")
    assert "override" in html_doc and "kind-override" in html_doc
    with pytest.raises(ValueError):
        recorder.export("scope", "pdf")


def test_verify_scope_detects_gaps_and_unpaired_calls():
    def ev(seq, kind, payload):
        return TraceEvent(seq=seq, timestamp="t", scope_id="s", kind=kind,
                          payload=payload)

    with pytest.raises(ValueError, match="gap"):
        verify_scope([ev(1, "error", {}), ev(3, "error", {})])
    with pytest.raises(ValueError, match="pair"):
        verify_scope([ev(1, "tool_call", {"call_id": "c1"})])


def test_concurrent_writers_keep_sequence_gap_free(tmp_path):
    recorder = TraceRecorder(tmp_path)

    def worker():
        for _ in range(25):
            recorder.record("scope", "error", {})

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    verify_scope(list(recorder.events("scope")))


def test_null_recorder_keeps_events_in_memory():
    recorder = NullRecorder()
    recorder.record("s", "error", {"x": 1})
    assert [e.payload for e in recorder.events("s")] == [{"x": 1}]
    with pytest.raises(NotFoundError):
        list(recorder.events("other"))
