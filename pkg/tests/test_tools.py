import pytest

from congress_rag.agent.registry import ToolCall
from congress_rag.embeddings import HashEmbedder
from congress_rag.models import EmbeddedDocument
from congress_rag.relational import RelationalStore
from congress_rag.tools import (build_registry, search_article_archives,
                                search_bill_summaries)
from congress_rag.vectorstore import VectorStore

CORE_TOOLS = {
    "get_bill_status", "get_committee_assignments", "get_les",
    "get_nominate_score", "get_roll_call_summary", "search_bill_summaries",
    "search_article_archives", "get_bill_details", "get_bill_actions",
    "get_member_info",
}


@pytest.fixture
def env():
    embedder = HashEmbedder(dimension=8)
    store = VectorStore()
    bills = store.create("bills", 8)
    articles = store.create("articles", 8)
    texts = {
        "113-hr-1": "immigration reform pathway citizenship",
        "113-hr-2": "defense appropriations budget",
        "114-hr-1": "immigration enforcement border",
    }
    for bill_id, text in texts.items():
        congress = bill_id.split("-")[0]
        bills.upsert(EmbeddedDocument(
            doc_id=bill_id, collection="bills", text=text,
            vector=embedder.embed([text])[0],
            metadata={"congress": congress, "bill_id": bill_id}))
    for i, (year, text) in enumerate([(2013, "immigration debate"),
                                      (2014, "border crisis"),
                                      (2015, "budget fight")]):
        articles.upsert(EmbeddedDocument(
            doc_id=f"article-{i}", collection="articles", text=text,
            vector=embedder.embed([text])[0], metadata={"year": str(year)}))
    relational = RelationalStore()
    relational.upsert_bill_status("113-hr-1", True, "Became Public Law")
    return store, embedder, relational


def test_registry_exposes_all_core_tools(env):
    registry = build_registry(*env)
    assert CORE_TOOLS <= set(registry.names())
    assert "run_readonly_sql" not in registry
    flagged = build_registry(*env, enable_readonly_sql=True)
    assert "run_readonly_sql" in flagged


def test_search_bill_summaries_filters_by_congress(env):
    store, embedder, _ = env
    hits = search_bill_summaries(store, embedder, "immigration reform", 113,
                                 threshold=-1.0)
    assert all(h.metadata["congress"] == "113" for h in hits)
    assert hits[0].doc_id == "113-hr-1"


def test_search_article_archives_unions_years(env):
    store, embedder, _ = env
    hits = search_article_archives(store, embedder, "immigration border",
                                   (2013, 2014), threshold=-1.0)
    assert {h.metadata["year"] for h in hits} == {"2013", "2014"}
    single = search_article_archives(store, embedder, "immigration border",
                                     (2013, 2013), threshold=-1.0)
    assert {h.metadata["year"] for h in single} == {"2013"}


def test_empty_query_rejected(env):
    store, embedder, _ = env
    from congress_rag.errors import ToolError
    with pytest.raises(ToolError):
        search_bill_summaries(store, embedder, "", 113)


def test_dispatch_get_bill_status(env):
    registry = build_registry(*env)
    ok = registry.dispatch(ToolCall("c1", "get_bill_status", {"bill_id": "113-hr-1"}))
    assert ok.payload == {"enacted": True, "status": "Became Public Law"}
    missing = registry.dispatch(ToolCall("c2", "get_bill_status", {"bill_id": "113-hr-9"}))
    assert missing.payload["error_kind"] == "not_found"
    malformed = registry.dispatch(ToolCall("c3", "get_bill_status", {"bill_id": "nope"}))
    assert malformed.payload["error_kind"] == "invalid_arguments"


def test_dispatch_search_tools(env):
    registry = build_registry(*env)
    result = registry.dispatch(ToolCall("c1", "search_bill_summaries",
                                        {"query_text": "immigration reform",
                                         "congress": 113, "threshold": -1.0}))
    assert not result.is_error
    assert result.payload[0]["doc_id"] == "113-hr-1"


def test_api_tools_error_without_client(env):
    registry = build_registry(*env)
    result = registry.dispatch(ToolCall("c1", "get_bill_details",
                                        {"bill_id": "113-hr-1"}))
    assert result.payload["error_kind"] == "configuration_error"


def test_web_search_stub_registered(env):
    registry = build_registry(*env)
    result = registry.dispatch(ToolCall("c1", "web_search", {"query": "x"}))
    assert result.payload["available"] is False
