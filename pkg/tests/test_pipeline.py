import json

import pytest

from congress_rag.agent.providers import AssistantStep, ScriptedProvider
from congress_rag.embeddings import HashEmbedder
from congress_rag.errors import IllegalStateError, NotFoundError
from congress_rag.models import EmbeddedDocument, GridlockResult
from congress_rag.pipeline import (GridlockPipeline, PipelineConfig, congress_years,
                                   rederive_gridlock, series_to_csv, series_to_svg)
from congress_rag.relational import RelationalStore
from congress_rag.replay import build_replay_pipeline
from congress_rag.tools import build_registry
from congress_rag.trace import TraceEvent, TraceRecorder, verify_scope
from congress_rag.vectorstore import VectorStore

from conftest import REPLAY_ROOT

CLUSTERS_TEXT = json.dumps({"clusters": [
    {"name": "Alpha", "articles": [], "article_count": 2, "summary": "s",
     "query": "immigration reform"},
    {"name": "Beta", "articles": [], "article_count": 1, "summary": "s",
     "query": "defense budget"},
]})


def scripted_pipeline(tmp_path, steps_by_call=None, config=None):
    """Small two-cluster environment with a scripted step-1 provider."""
    embedder = HashEmbedder(dimension=8)
    store = VectorStore()
    bills = store.create("bills", 8)
    texts = {
        "113-hr-1": "immigration reform pathway citizenship",
        "113-hr-2": "defense appropriations budget",
        "113-hr-3": "postal service naming",
    }
    for bill_id, text in texts.items():
        bills.upsert(EmbeddedDocument(
            doc_id=bill_id, collection="bills", text=text,
            vector=embedder.embed([text])[0],
            metadata={"congress": "113", "bill_id": bill_id}))
    store.create("articles", 8)
    relational = RelationalStore()
    relational.upsert_bill_status("113-hr-1", True, "Became Public Law")
    relational.upsert_bill_status("113-hr-2", False, "In Committee")
    relational.upsert_bill_status("113-hr-3", False, "In Committee")
    registry = build_registry(store, embedder, relational)

    steps = steps_by_call or [AssistantStep.of_text(CLUSTERS_TEXT)]

    def provider_factory(congress):
        return ScriptedProvider(list(steps))

    tracer = TraceRecorder(tmp_path / "trace")
    return GridlockPipeline(store, embedder, registry, provider_factory, tracer,
                            tmp_path / "runs",
                            config=config or PipelineConfig(threshold=-1.0))


def test_congress_years():
    assert congress_years(113) == (2013, 2014)
    assert congress_years(118) == (2023, 2024)


def test_full_run_reaches_awaiting_review(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.run_congress(113)
    assert run.state == "awaiting_review"
    assert len(run.clusters) == 2
    reports = {r.cluster.name: r for r in run.reports()}
    assert reports["Alpha"].has_enacted_legislation is True
    assert reports["Beta"].bills  # candidates retrieved at threshold -1


def test_finalize_requires_awaiting_review(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.create_run(113)
    with pytest.raises(IllegalStateError):
        pipeline.finalize(run.run_id)
    completed = pipeline.run_congress(113)
    result = pipeline.finalize(completed.run_id)
    assert isinstance(result, GridlockResult)
    with pytest.raises(IllegalStateError):
        pipeline.finalize(completed.run_id)


def test_no_review_finalizes_directly(tmp_path):
    pipeline = scripted_pipeline(tmp_path,
                                 config=PipelineConfig(threshold=-1.0, no_review=True))
    run = pipeline.run_congress(113)
    assert run.state == "finalized"
    assert run.result is not None
    assert run.result.total_clusters == 2


def test_per_run_no_review_overrides_config(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.create_run(113, no_review=True)
    finished = pipeline.run_congress(113, resume_run_id=run.run_id)
    assert finished.state == "finalized"


def test_step1_reprompts_once_on_invalid_output(tmp_path):
    pipeline = scripted_pipeline(tmp_path, steps_by_call=[
        AssistantStep.of_text("I think the clusters are interesting."),
        AssistantStep.of_text(CLUSTERS_TEXT),
    ])
    run = pipeline.run_congress(113)
    assert run.state == "awaiting_review"


def test_step1_fails_after_two_invalid_attempts(tmp_path):
    pipeline = scripted_pipeline(tmp_path, steps_by_call=[
        AssistantStep.of_text("still not json"),
        AssistantStep.of_text("also not json"),
    ])
    with pytest.raises(IllegalStateError):
        pipeline.run_congress(113)
    run_id = pipeline.list_runs()[0]
    run = pipeline.load(run_id)
    assert run.state == "failed"
    assert run.warnings


def test_resume_from_persisted_state(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.create_run(113)
    provider = pipeline.provider_factory(113)
    pipeline.step1_identify_clusters(run, provider)
    assert pipeline.load(run.run_id).state == "step2"

    # A fresh pipeline object (as after a crash) resumes where the run stopped.
    resumed_pipeline = scripted_pipeline(tmp_path)
    resumed = resumed_pipeline.run_congress(113, resume_run_id=run.run_id)
    assert resumed.state == "awaiting_review"
    assert len(resumed.clusters) == 2


def test_review_override_threshold_and_toggles(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.run_congress(113)
    base = pipeline.finalize(run.run_id)

    report, result = pipeline.review_override(run.run_id, "Alpha",
                                              bill_overrides={"113-hr-1": False})
    assert report.has_enacted_legislation is False
    assert result.score >= base.score
    # The finalized result is updated in place.
    assert pipeline.load(run.run_id).result == result

    report, result2 = pipeline.review_override(run.run_id, "Alpha",
                                               bill_overrides={"113-hr-1": True})
    assert report.has_enacted_legislation is True
    assert result2.score <= result.score


def test_review_override_validation(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.create_run(113)
    with pytest.raises(IllegalStateError):
        pipeline.review_override(run.run_id, "Alpha", threshold=0.5)
    finished = pipeline.run_congress(113)
    with pytest.raises(ValueError):
        pipeline.review_override(finished.run_id, "Alpha", threshold=2.0)
    with pytest.raises(NotFoundError):
        pipeline.review_override(finished.run_id, "Gamma", threshold=0.5)


def test_rederivation_accounts_for_overrides(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.run_congress(113)
    pipeline.finalize(run.run_id)
    _, result = pipeline.review_override(run.run_id, "Alpha",
                                         bill_overrides={"113-hr-1": False})
    events = [TraceEvent.from_json(json.loads(line))
              for line in pipeline.tracer.export(run.run_id, "jsonl").splitlines()]
    verify_scope(events)
    derived = rederive_gridlock(events)
    assert derived["score"] == result.score
    assert derived["gridlocked_clusters"] == result.gridlocked_clusters


def test_run_persistence_round_trip(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.run_congress(113)
    loaded = pipeline.load(run.run_id)
    assert loaded.to_json() == run.to_json()
    with pytest.raises(NotFoundError):
        pipeline.load("run-000-missing")


def test_override_events_carry_actor(tmp_path):
    pipeline = scripted_pipeline(tmp_path)
    run = pipeline.run_congress(113)
    pipeline.review_override(run.run_id, "Alpha", threshold=0.1, actor="alice")
    overrides = [e for e in pipeline.tracer.events(run.run_id) if e.kind == "override"]
    assert overrides[-1].payload["actor"] == "alice"
    assert overrides[-1].payload["threshold"] == 0.1


def test_series_exports():
    results = [
        GridlockResult(113, 4, 8, 0.5, "r1", "t1"),
        GridlockResult(114, 1, 10, 0.1, "r2", "t2"),
    ]
    csv_text = series_to_csv(results)
    assert csv_text == "congress,score\n113,0.5\n114,0.1\n"
    svg = series_to_svg(results)
    assert svg.count("<rect") == 2
    assert "113" in svg and "0.5" in svg
    assert series_to_svg([]).startswith("<svg")


def test_replay_fixture_run_traces_three_step_boundaries(tmp_path):
    pipeline = build_replay_pipeline(REPLAY_ROOT, tmp_path / "runs",
                                     tmp_path / "trace",
                                     config=PipelineConfig(no_review=True))
    run = pipeline.run_congress(113)
    boundaries = [e.payload for e in pipeline.tracer.events(run.run_id)
                  if e.kind == "step_boundary"]
    assert [b["step"] for b in boundaries] == [1, 2, 3]
    assert len(run.clusters) == 8
