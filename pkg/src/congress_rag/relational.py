"""Structured, exact retrieval over legislative tables.

SQLite-backed store with a fixed schema and parameterized lookups. The
agent gets fixed query tools rather than free-form SQL; a feature-flagged
read-only SQL tool exists for the dynamic-query mode but is off by default.
"""

from __future__ import annotations

import csv
import sqlite3
import threading
from pathlib import Path

from .errors import IngestionError, NotFoundError
from .models import BillId, CommitteeAssignment, MemberScores, RollCallSummary

TABLE_COLUMNS = {
    "bill_status": ["bill_id", "enacted", "status_text"],
    "committee_assignments": ["bioguide_id", "congress", "committee_name", "is_chair"],
    "member_scores": ["bioguide_id", "congress", "les", "nominate_dim1", "nominate_dim2"],
    "roll_calls": ["bill_id", "roll_number", "yea", "nay", "result"],
}

_SCHEMA = """
CREATE TABLE IF NOT EXISTS bill_status (
    bill_id TEXT PRIMARY KEY,
    enacted INTEGER NOT NULL,
    status_text TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS committee_assignments (
    bioguide_id TEXT NOT NULL,
    congress INTEGER NOT NULL,
    committee_name TEXT NOT NULL,
    is_chair INTEGER NOT NULL,
    UNIQUE (bioguide_id, congress, committee_name)
);
CREATE TABLE IF NOT EXISTS member_scores (
    bioguide_id TEXT NOT NULL,
    congress INTEGER NOT NULL,
    les REAL,
    nominate_dim1 REAL,
    nominate_dim2 REAL,
    UNIQUE (bioguide_id, congress)
);
CREATE TABLE IF NOT EXISTS roll_calls (
    bill_id TEXT NOT NULL,
    roll_number INTEGER NOT NULL,
    yea INTEGER NOT NULL,
    nay INTEGER NOT NULL,
    result TEXT NOT NULL
);
"""

_TRUTHY = {"1", "true", "t", "yes", "y"}
_FALSY = {"0", "false", "f", "no", "n", ""}


def _parse_bool(raw: str, line_no: int, column: str) -> int:
    val = raw.strip().lower()
    if val in _TRUTHY:
        return 1
    if val in _FALSY:
        return 0
    raise IngestionError(f"line {line_no}: column {column!r} has non-boolean value {raw!r}")


class RelationalStore:
    """Thread-safe reads; ingestion holds an exclusive write lock."""

    def __init__(self, path: str | Path = ":memory:"):
        self.path = str(path)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.executescript(_SCHEMA)
        self._write_lock = threading.Lock()

    def close(self) -> None:
        self._conn.close()

    # --- lookups ----------------------------------------------------------

    def get_bill_status(self, bill_id: BillId) -> dict:
        row = self._conn.execute(
            "SELECT enacted, status_text FROM bill_status WHERE bill_id = ?",
            (bill_id.render(),),
        ).fetchone()
        if row is None:
            raise NotFoundError(f"no status row for bill {bill_id.render()!r}")
        return {"enacted": bool(row[0]), "status": row[1]}

    def get_committee_assignments(self, bioguide_id: str, congress: int) -> list[CommitteeAssignment]:
        rows = self._conn.execute(
            "SELECT committee_name, is_chair FROM committee_assignments "
            "WHERE bioguide_id = ? AND congress = ? ORDER BY committee_name",
            (bioguide_id, congress),
        ).fetchall()
        return [
            CommitteeAssignment(bioguide_id=bioguide_id, congress=congress,
                                committee_name=name, is_chair=bool(chair))
            for name, chair in rows
        ]

    def get_les(self, bioguide_id: str, congress: int) -> float:
        row = self._conn.execute(
            "SELECT les FROM member_scores WHERE bioguide_id = ? AND congress = ?",
            (bioguide_id, congress),
        ).fetchone()
        if row is None or row[0] is None:
            raise NotFoundError(f"no LES for ({bioguide_id!r}, {congress})")
        return float(row[0])

    def get_nominate_score(self, bioguide_id: str, congress: int) -> dict:
        row = self._conn.execute(
            "SELECT nominate_dim1, nominate_dim2 FROM member_scores "
            "WHERE bioguide_id = ? AND congress = ?",
            (bioguide_id, congress),
        ).fetchone()
        if row is None:
            raise NotFoundError(f"no NOMINATE scores for ({bioguide_id!r}, {congress})")
        return {
            "dim1": None if row[0] is None else float(row[0]),
            "dim2": None if row[1] is None else float(row[1]),
        }

    def get_member_scores(self, bioguide_id: str, congress: int) -> MemberScores:
        row = self._conn.execute(
            "SELECT les, nominate_dim1, nominate_dim2 FROM member_scores "
            "WHERE bioguide_id = ? AND congress = ?",
            (bioguide_id, congress),
        ).fetchone()
        if row is None:
            raise NotFoundError(f"no score row for ({bioguide_id!r}, {congress})")
        return MemberScores(bioguide_id=bioguide_id, congress=congress,
                            les=row[0], nominate_dim1=row[1], nominate_dim2=row[2])

    def get_roll_call_summary(self, bill_id: BillId) -> list[RollCallSummary]:
        rows = self._conn.execute(
            "SELECT roll_number, yea, nay, result FROM roll_calls "
            "WHERE bill_id = ? ORDER BY roll_number",
            (bill_id.render(),),
        ).fetchall()
        return [
            RollCallSummary(bill_id=bill_id, roll_number=rn, yea=yea, nay=nay, result=res)
            for rn, yea, nay, res in rows
        ]

    def run_readonly_sql(self, query: str) -> list[dict]:
        """Free-form read-only query mode; callers gate this behind a flag."""
        stripped = query.strip().rstrip(";").strip()
        if not stripped.lower().startswith("select"):
            raise ValueError("only SELECT statements are permitted")
        cur = self._conn.execute(stripped)
        cols = [c[0] for c in cur.description]
        return [dict(zip(cols, row)) for row in cur.fetchall()]

    # --- ingestion ----------------------------------------------------------

    def ingest_table(self, csv_path: str | Path, table_name: str) -> int:
        """Truncate-and-load a table from CSV; idempotent per file."""
        if table_name not in TABLE_COLUMNS:
            raise IngestionError(f"unknown table {table_name!r}")
        expected = TABLE_COLUMNS[table_name]
        rows = []
        with Path(csv_path).open(encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            header = reader.fieldnames or []
            missing = [c for c in expected if c not in header]
            if missing:
                raise IngestionError(
                    f"{csv_path}: header is missing columns: {', '.join(missing)}")
            for line_no, raw in enumerate(reader, start=2):
                rows.append(self._convert_row(table_name, raw, line_no))
        with self._write_lock, self._conn:
            self._conn.execute(f"DELETE FROM {table_name}")
            placeholders = ", ".join("?" for _ in expected)
            self._conn.executemany(
                f"INSERT INTO {table_name} ({', '.join(expected)}) VALUES ({placeholders})",
                rows,
            )
        return len(rows)

    def upsert_bill_status(self, bill_id: str, enacted: bool, status_text: str) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "INSERT INTO bill_status (bill_id, enacted, status_text) VALUES (?, ?, ?) "
                "ON CONFLICT(bill_id) DO UPDATE SET enacted=excluded.enacted, "
                "status_text=excluded.status_text",
                (bill_id, int(enacted), status_text),
            )

    def count(self, table_name: str) -> int:
        if table_name not in TABLE_COLUMNS:
            raise IngestionError(f"unknown table {table_name!r}")
        return self._conn.execute(f"SELECT COUNT(*) FROM {table_name}").fetchone()[0]

    @staticmethod
    def _convert_row(table_name: str, raw: dict, line_no: int) -> tuple:
        def number(column: str, cast, required: bool):
            val = (raw.get(column) or "").strip()
            if not val:
                if required:
                    raise IngestionError(f"line {line_no}: column {column!r} is empty")
                return None
            try:
                return cast(val)
            except ValueError:
                raise IngestionError(
                    f"line {line_no}: column {column!r} has malformed value {val!r}") from None

        if table_name == "bill_status":
            return (raw["bill_id"].strip(),
                    _parse_bool(raw["enacted"], line_no, "enacted"),
                    raw["status_text"].strip())
        if table_name == "committee_assignments":
            return (raw["bioguide_id"].strip(),
                    number("congress", int, required=True),
                    raw["committee_name"].strip(),
                    _parse_bool(raw["is_chair"], line_no, "is_chair"))
        if table_name == "member_scores":
            return (raw["bioguide_id"].strip(),
                    number("congress", int, required=True),
                    number("les", float, required=False),
                    number("nominate_dim1", float, required=False),
                    number("nominate_dim2", float, required=False))
        if table_name == "roll_calls":
            return (raw["bill_id"].strip(),
                    number("roll_number", int, required=True),
                    number("yea", int, required=True),
                    number("nay", int, required=True),
                    raw["result"].strip())
        raise IngestionError(f"unknown table {table_name!r}")
