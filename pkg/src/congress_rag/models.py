"""Core domain types shared by every other module.

All types are immutable values (frozen dataclasses) and serialize to JSON
with snake_case field names. `ClusterReport.to_report_json()` emits the
golden external report format used for exports and golden tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Any

from .errors import BillIdParseError

BILL_TYPES = ("hr", "s", "hjres", "sjres", "hconres", "sconres", "hres", "sres")

_BILL_ID_RE = re.compile(r"^(?P<congress>[^-]*)-(?P<bill_type>[^-]*)-(?P<bill_number>[^-]*)$")


@dataclass(frozen=True, order=True)
class BillId:
    congress: int
    bill_type: str
    bill_number: int

    def __post_init__(self):
        if not (isinstance(self.congress, int) and self.congress > 0):
            raise ValueError(f"congress must be a positive integer, got {self.congress!r}")
        if self.bill_type not in BILL_TYPES:
            raise ValueError(f"unknown bill_type {self.bill_type!r}")
        if not (isinstance(self.bill_number, int) and self.bill_number > 0):
            raise ValueError(f"bill_number must be a positive integer, got {self.bill_number!r}")

    def render(self) -> str:
        return f"{self.congress}-{self.bill_type}-{self.bill_number}"

    def __str__(self) -> str:
        return self.render()


def parse_bill_id(text: str) -> BillId:
    """Parse the canonical "{congress}-{type}-{number}" form, case-insensitive on type."""
    if not isinstance(text, str) or not text:
        raise BillIdParseError("bill id must be non-empty text")
    m = _BILL_ID_RE.match(text.strip())
    if m is None:
        parts = text.strip().split("-")
        if len(parts) < 3:
            missing = ["congress", "bill_type", "bill_number"][len(parts):]
            raise BillIdParseError(f"malformed bill id {text!r}: missing {', '.join(missing)}")
        raise BillIdParseError(f"malformed bill id {text!r}: expected 3 segments, got {len(parts)}")
    congress_s = m.group("congress")
    type_s = m.group("bill_type").lower()
    number_s = m.group("bill_number")
    if not congress_s.isdigit() or int(congress_s) <= 0:
        raise BillIdParseError(f"malformed bill id {text!r}: congress segment {congress_s!r} is not a positive integer")
    if type_s not in BILL_TYPES:
        raise BillIdParseError(f"malformed bill id {text!r}: unknown bill_type segment {type_s!r}")
    if not number_s.isdigit() or int(number_s) <= 0:
        raise BillIdParseError(f"malformed bill id {text!r}: bill_number segment {number_s!r} is not a positive integer")
    return BillId(int(congress_s), type_s, int(number_s))


def render_bill_id(bill_id: BillId) -> str:
    return bill_id.render()


@dataclass(frozen=True)
class BillRecord:
    id: BillId
    title: str
    summary: str
    introduced_date: str  # ISO calendar date
    sponsor_bioguide_ids: tuple[str, ...]
    enacted: bool
    status_text: str

    def __post_init__(self):
        if self.enacted and not self.status_text:
            raise ValueError("enacted bills must carry a non-empty status_text")

    def to_json(self) -> dict[str, Any]:
        return {
            "bill_id": self.id.render(),
            "title": self.title,
            "summary": self.summary,
            "introduced_date": self.introduced_date,
            "sponsor_bioguide_ids": list(self.sponsor_bioguide_ids),
            "enacted": self.enacted,
            "status_text": self.status_text,
        }


@dataclass(frozen=True)
class MemberRecord:
    bioguide_id: str
    name: str
    state: str
    chamber: str  # "house" | "senate"
    terms: tuple[tuple[int, str], ...]  # (congress, party)

    def __post_init__(self):
        if not self.bioguide_id:
            raise ValueError("bioguide_id must be non-empty")
        if not self.terms:
            raise ValueError("terms must be non-empty")

    def to_json(self) -> dict[str, Any]:
        return {
            "bioguide_id": self.bioguide_id,
            "name": self.name,
            "state": self.state,
            "chamber": self.chamber,
            "terms": [{"congress": c, "party": p} for c, p in self.terms],
        }


@dataclass(frozen=True)
class MemberScores:
    bioguide_id: str
    congress: int
    les: float | None = None
    nominate_dim1: float | None = None
    nominate_dim2: float | None = None

    def __post_init__(self):
        for dim in (self.nominate_dim1, self.nominate_dim2):
            if dim is not None and not -1.0 <= dim <= 1.0:
                raise ValueError(f"NOMINATE dimension {dim} outside [-1, 1]")
        if self.les is not None and self.les < 0:
            raise ValueError("les must be >= 0")


@dataclass(frozen=True)
class CommitteeAssignment:
    bioguide_id: str
    congress: int
    committee_name: str
    is_chair: bool

    def __post_init__(self):
        if not self.committee_name:
            raise ValueError("committee_name must be non-empty")

    def to_json(self) -> dict[str, Any]:
        return {
            "bioguide_id": self.bioguide_id,
            "congress": self.congress,
            "committee_name": self.committee_name,
            "is_chair": self.is_chair,
        }


@dataclass(frozen=True)
class RollCallSummary:
    bill_id: BillId
    roll_number: int
    yea: int
    nay: int
    result: str

    def __post_init__(self):
        if self.yea + self.nay <= 0:
            raise ValueError("a roll call must record at least one vote")

    def to_json(self) -> dict[str, Any]:
        return {
            "bill_id": self.bill_id.render(),
            "roll_number": self.roll_number,
            "yea": self.yea,
            "nay": self.nay,
            "result": self.result,
        }


@dataclass(frozen=True)
class EmbeddedDocument:
    doc_id: str
    collection: str  # "articles" | "bills"
    text: str
    vector: tuple[float, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "collection": self.collection,
            "text": self.text,
            "vector": list(self.vector),
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "EmbeddedDocument":
        return cls(
            doc_id=obj["doc_id"],
            collection=obj["collection"],
            text=obj["text"],
            vector=tuple(float(x) for x in obj["vector"]),
            metadata={str(k): str(v) for k, v in obj.get("metadata", {}).items()},
        )


@dataclass(frozen=True)
class PolicyCluster:
    name: str
    summary: str
    article_refs: tuple[str, ...]
    article_count: int
    query: str

    def __post_init__(self):
        if not self.query:
            raise ValueError("cluster query must be non-empty")
        if self.article_count <= 0:
            raise ValueError("article_count must be positive")

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "articles": list(self.article_refs),
            "article_count": self.article_count,
            "summary": self.summary,
            "query": self.query,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "PolicyCluster":
        return cls(
            name=obj["name"],
            summary=obj["summary"],
            article_refs=tuple(obj.get("articles", [])),
            article_count=int(obj["article_count"]),
            query=obj["query"],
        )


@dataclass(frozen=True)
class BillMatch:
    bill_id: BillId
    title: str
    score: float
    enacted: bool
    status: str
    included: bool = True
    summary: str = ""

    def __post_init__(self):
        if not -1.0 - 1e-12 <= self.score <= 1.0 + 1e-12:
            raise ValueError(f"score {self.score} outside [-1, 1]")

    def to_json(self) -> dict[str, Any]:
        return {
            "bill_id": self.bill_id.render(),
            "title": self.title,
            "summary": self.summary,
            "bill_type": self.bill_id.bill_type,
            "bill_number": str(self.bill_id.bill_number),
            "score": self.score,
            "enacted": self.enacted,
            "status": self.status,
        }


def _match_sort_key(m: BillMatch) -> tuple[float, str]:
    return (-m.score, m.bill_id.render())


@dataclass(frozen=True)
class ClusterReport:
    cluster: PolicyCluster
    threshold: float
    bills: tuple[BillMatch, ...]
    total_bills_found: int
    enacted_bills: int
    has_enacted_legislation: bool
    enactment_rate: float

    @classmethod
    def build(cls, cluster: PolicyCluster, threshold: float,
              matches: list[BillMatch] | tuple[BillMatch, ...]) -> "ClusterReport":
        """Assemble a report from raw matches, enforcing ordering and aggregates."""
        kept = sorted((m for m in matches if m.score >= threshold), key=_match_sort_key)
        total = len(kept)
        enacted = sum(1 for m in kept if m.included and m.enacted)
        return cls(
            cluster=cluster,
            threshold=threshold,
            bills=tuple(kept),
            total_bills_found=total,
            enacted_bills=enacted,
            has_enacted_legislation=enacted > 0,
            enactment_rate=(enacted / total) if total > 0 else 0.0,
        )

    def with_overrides(self, threshold: float | None = None,
                       bill_overrides: dict[str, bool] | None = None) -> "ClusterReport":
        """Re-filter at a new threshold and/or apply include/exclude overrides."""
        tau = self.threshold if threshold is None else threshold
        overrides = bill_overrides or {}
        updated = [
            replace(m, included=overrides.get(m.bill_id.render(), m.included))
            for m in self.bills
        ]
        return ClusterReport.build(self.cluster, tau, updated)

    def to_report_json(self) -> dict[str, Any]:
        """Golden external report format (snake_case, fixed field set)."""
        return {
            "cluster_name": self.cluster.name,
            "query": self.cluster.query,
            "threshold": self.threshold,
            "total_bills_found": self.total_bills_found,
            "enacted_bills": self.enacted_bills,
            "has_enacted_legislation": self.has_enacted_legislation,
            "enactment_rate": self.enactment_rate,
            "bills": [m.to_json() for m in self.bills],
        }

    def to_json(self) -> dict[str, Any]:
        """Full persistence form (keeps per-bill included flags and cluster detail)."""
        doc = self.to_report_json()
        doc["cluster"] = self.cluster.to_json()
        doc["included"] = {m.bill_id.render(): m.included for m in self.bills}
        return doc

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "ClusterReport":
        cluster = PolicyCluster.from_json(obj["cluster"])
        included = obj.get("included", {})
        matches = [
            BillMatch(
                bill_id=parse_bill_id(b["bill_id"]),
                title=b["title"],
                summary=b.get("summary", ""),
                score=float(b["score"]),
                enacted=bool(b["enacted"]),
                status=b["status"],
                included=bool(included.get(b["bill_id"], True)),
            )
            for b in obj["bills"]
        ]
        return cls.build(cluster, float(obj["threshold"]), matches)


@dataclass(frozen=True)
class GridlockResult:
    congress: int
    gridlocked_clusters: int  # clusters with no enacted legislation
    total_clusters: int
    score: float
    run_id: str
    trace_ref: str

    def __post_init__(self):
        if self.total_clusters < 1:
            raise ValueError("a gridlock score needs at least one cluster")
        if self.gridlocked_clusters > self.total_clusters:
            raise ValueError("gridlocked clusters cannot exceed total clusters")

    def to_json(self) -> dict[str, Any]:
        return {
            "congress": self.congress,
            "gridlocked_clusters": self.gridlocked_clusters,
            "total_clusters": self.total_clusters,
            "score": self.score,
            "run_id": self.run_id,
            "trace_ref": self.trace_ref,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "GridlockResult":
        return cls(
            congress=int(obj["congress"]),
            gridlocked_clusters=int(obj["gridlocked_clusters"]),
            total_clusters=int(obj["total_clusters"]),
            score=float(obj["score"]),
            run_id=obj["run_id"],
            trace_ref=obj["trace_ref"],
        )


def compute_gridlock_score(gridlocked: int, total: int) -> float:
    """Fraction of clusters with no enacted legislation; exact IEEE division."""
    if total < 1:
        raise ValueError("score undefined for zero clusters")
    if not 0 <= gridlocked <= total:
        raise ValueError("gridlocked count must lie in [0, total]")
    return gridlocked / total
