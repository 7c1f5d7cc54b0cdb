"""The agent's tool surface.

Builds a ToolRegistry exposing the ten retrieval functions over the vector
store, the relational store, and the HTTP API clients, plus the pluggable
web-search stub. Handlers raise ToolError for structured failures; dispatch
converts those into error results the model can react to.
"""

from __future__ import annotations

from typing import Any

from .agent.registry import ToolDefinition, ToolRegistry
from .clients import ArchiveApiClient, CongressApiClient, WebSearchStub
from .errors import (BillIdParseError, NotFoundError, ProviderError, ToolError,
                     TransportError)
from .models import parse_bill_id
from .relational import RelationalStore
from .vectorstore import SearchHit, VectorStore

DEFAULT_BILL_TOP_K = 100
DEFAULT_ARTICLE_TOP_K = 200
DEFAULT_THRESHOLD = 0.4


def _bill_id_or_error(raw: str):
    try:
        return parse_bill_id(raw)
    except BillIdParseError as exc:
        raise ToolError("invalid_arguments", str(exc)) from exc


def _wrap_not_found(fn):
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NotFoundError as exc:
            raise ToolError("not_found", str(exc)) from exc
    return inner


def search_bill_summaries(store: VectorStore, embedder, query_text: str,
                          congress: int, top_k: int = DEFAULT_BILL_TOP_K,
                          threshold: float = DEFAULT_THRESHOLD) -> list[SearchHit]:
    if not query_text:
        raise ToolError("invalid_arguments", "query_text must be non-empty")
    try:
        vector = embedder.embed([query_text])[0]
    except ProviderError as exc:
        raise ToolError("embedding_failed", str(exc)) from exc
    return store.get("bills").search(
        vector, top_k=top_k, threshold=threshold,
        metadata_filter={"congress": str(congress)},
    )


def search_article_archives(store: VectorStore, embedder, query_text: str,
                            year_range: tuple[int, int],
                            top_k: int = DEFAULT_ARTICLE_TOP_K,
                            threshold: float = DEFAULT_THRESHOLD) -> list[SearchHit]:
    if not query_text:
        raise ToolError("invalid_arguments", "query_text must be non-empty")
    try:
        vector = embedder.embed([query_text])[0]
    except ProviderError as exc:
        raise ToolError("embedding_failed", str(exc)) from exc
    collection = store.get("articles")
    hits: list[SearchHit] = []
    # The store filters on exact metadata pairs; a year range is the union of
    # per-year searches re-ranked and truncated.
    for year in range(year_range[0], year_range[1] + 1):
        hits.extend(collection.search(
            vector, top_k=top_k, threshold=threshold,
            metadata_filter={"year": str(year)},
        ))
    hits.sort(key=lambda h: (-h.score, h.doc_id))
    return hits[:top_k]


def build_registry(vector_store: VectorStore, embedder,
                   relational: RelationalStore,
                   congress_client: CongressApiClient | None = None,
                   archive_client: ArchiveApiClient | None = None,
                   web_search: WebSearchStub | None = None,
                   enable_readonly_sql: bool = False) -> ToolRegistry:
    registry = ToolRegistry()
    bill_id_param = {"bill_id": {"type": "string", "description": "canonical id, e.g. 113-s-1"}}
    member_params = {
        "bioguide_id": {"type": "string"},
        "congress": {"type": "integer"},
    }

    def schema(props: dict[str, Any], required: list[str]) -> dict[str, Any]:
        return {"type": "object", "properties": props, "required": required,
                "additionalProperties": False}

    # --- relational lookups -------------------------------------------------

    registry.register(
        ToolDefinition("get_bill_status",
                       "Look up whether a bill was enacted into law and its status text.",
                       schema(bill_id_param, ["bill_id"])),
        _wrap_not_found(lambda args: relational.get_bill_status(_bill_id_or_error(args["bill_id"]))),
    )
    registry.register(
        ToolDefinition("get_committee_assignments",
                       "Committees a member served on in one Congress, with chair flags.",
                       schema(member_params, ["bioguide_id", "congress"])),
        lambda args: [a.to_json() for a in relational.get_committee_assignments(
            args["bioguide_id"], args["congress"])],
    )
    registry.register(
        ToolDefinition("get_les",
                       "Legislative Effectiveness Score for a member in one Congress.",
                       schema(member_params, ["bioguide_id", "congress"])),
        _wrap_not_found(lambda args: {"les": relational.get_les(
            args["bioguide_id"], args["congress"])}),
    )
    registry.register(
        ToolDefinition("get_nominate_score",
                       "First/second dimension NOMINATE ideology scores for a member.",
                       schema(member_params, ["bioguide_id", "congress"])),
        _wrap_not_found(lambda args: relational.get_nominate_score(
            args["bioguide_id"], args["congress"])),
    )
    registry.register(
        ToolDefinition("get_roll_call_summary",
                       "Roll-call votes recorded for a bill: roll number, yea/nay, result.",
                       schema(bill_id_param, ["bill_id"])),
        lambda args: [r.to_json() for r in relational.get_roll_call_summary(
            _bill_id_or_error(args["bill_id"]))],
    )

    # --- vector search ------------------------------------------------------

    registry.register(
        ToolDefinition("search_bill_summaries",
                       "Semantic search over bill summaries for one Congress.",
                       schema({
                           "query_text": {"type": "string"},
                           "congress": {"type": "integer"},
                           "top_k": {"type": "integer"},
                           "threshold": {"type": "number"},
                       }, ["query_text", "congress"])),
        lambda args: [h.to_json() for h in search_bill_summaries(
            vector_store, embedder, args["query_text"], args["congress"],
            top_k=args.get("top_k", DEFAULT_BILL_TOP_K),
            threshold=args.get("threshold", DEFAULT_THRESHOLD))],
    )
    registry.register(
        ToolDefinition("search_article_archives",
                       "Semantic search over news-article summaries for a year range.",
                       schema({
                           "query_text": {"type": "string"},
                           "year_from": {"type": "integer"},
                           "year_to": {"type": "integer"},
                           "top_k": {"type": "integer"},
                           "threshold": {"type": "number"},
                       }, ["query_text", "year_from", "year_to"])),
        lambda args: [h.to_json() for h in search_article_archives(
            vector_store, embedder, args["query_text"],
            (args["year_from"], args["year_to"]),
            top_k=args.get("top_k", DEFAULT_ARTICLE_TOP_K),
            threshold=args.get("threshold", DEFAULT_THRESHOLD))],
    )

    # --- HTTP API lookups ---------------------------------------------------

    def api_unavailable(args):
        raise ToolError("configuration_error", "no API client configured")

    registry.register(
        ToolDefinition("get_bill_details",
                       "Fetch a bill's title, sponsors and introduction date.",
                       schema(bill_id_param, ["bill_id"])),
        (lambda args: congress_client.get_bill_details(
            _bill_id_or_error(args["bill_id"])).to_json())
        if congress_client else api_unavailable,
    )
    registry.register(
        ToolDefinition("get_bill_actions",
                       "Fetch a bill's legislative history in chronological order.",
                       schema(bill_id_param, ["bill_id"])),
        (lambda args: congress_client.get_bill_actions(_bill_id_or_error(args["bill_id"])))
        if congress_client else api_unavailable,
    )
    registry.register(
        ToolDefinition("get_member_info",
                       "Biographical and role information for a member of Congress.",
                       schema({"bioguide_id": {"type": "string"}}, ["bioguide_id"])),
        (lambda args: congress_client.get_member_info(args["bioguide_id"]).to_json())
        if congress_client else api_unavailable,
    )

    # --- extras beyond the core ten -----------------------------------------

    searcher = web_search or WebSearchStub()
    registry.register(
        ToolDefinition("web_search",
                       "Web search (pluggable; structured unavailable result when not configured).",
                       schema({"query": {"type": "string"}}, ["query"])),
        lambda args: searcher.search(args["query"]),
    )
    if enable_readonly_sql:
        registry.register(
            ToolDefinition("run_readonly_sql",
                           "Run a read-only SELECT against the legislative tables.",
                           schema({"query": {"type": "string"}}, ["query"])),
            lambda args: relational.run_readonly_sql(args["query"]),
        )
    return registry
