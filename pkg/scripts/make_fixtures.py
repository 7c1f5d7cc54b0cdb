#!/usr/bin/env python3
"""Generate the committed replay fixtures under fixtures/replay/.

Deterministic by construction: vectors are hand-placed on basis directions
(cluster i -> e_i, spare dims 10/11 carry the off-axis mass), every vector
component is float32-representable, and the rank-1 immigration bill's
similarity is tuned to the recorded reference score to within 1e-10.

Run from the repository root:  python scripts/make_fixtures.py
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "replay"

DIM = 12
SPARE1, SPARE2 = 10, 11
THRESHOLD = 0.4
REFERENCE_SCORE = 0.585201323  # recorded rank-1 similarity for 113-s-1

# Per-Congress cluster fixtures: (name, query, article_count, enacted?).
# Gridlocked fractions: 113 -> 4/8, 114 -> 1/10, 115 -> 3/8, 116 -> 4/10,
# 117 -> 7/10, 118 -> 4/8.
CONGRESSES: dict[int, list[tuple[str, str, int, bool]]] = {
    113: [
        ("Government Funding and Fiscal Showdowns",
         "government shutdown debt ceiling budget appropriations fiscal crisis", 18, True),
        ("Immigration Reform",
         "immigration reform pathway citizenship border security executive action", 12, True),
        ("Gun Control Legislation",
         "gun control background checks assault weapons Newtown filibuster", 14, False),
        ("Congressional Dysfunction and Procedure",
         "congressional dysfunction filibuster reform productivity gridlock polarization", 22, False),
        ("Foreign Policy and National Security",
         "foreign policy Iran sanctions Syria authorization NSA surveillance", 11, True),
        ("Healthcare and Affordable Care Act",
         "Affordable Care Act Obamacare repeal defund healthcare reform", 9, False),
        ("Executive Action and Congressional Authority",
         "executive action executive order presidential power congressional authority", 10, False),
        ("Tax and Economic Policy",
         "tax reform economic policy minimum wage tax extenders", 8, True),
    ],
    114: [
        ("Trade Policy and Fast-Track Authority",
         "trade promotion authority trans-pacific partnership tariffs exports", 16, True),
        ("Criminal Justice Reform",
         "sentencing reform mandatory minimums prison recidivism", 12, True),
        ("Education Policy Overhaul",
         "elementary secondary education standards testing state flexibility", 9, True),
        ("Surface Transportation Funding",
         "highway trust fund surface transportation infrastructure funding", 11, True),
        ("Medicare Payment Reform",
         "medicare physician payment sustainable growth rate repeal", 8, True),
        ("Cybersecurity and Information Sharing",
         "cybersecurity information sharing data breach critical infrastructure", 10, True),
        ("Budget and Debt Limit",
         "budget agreement debt limit suspension spending caps", 13, True),
        ("Iran Nuclear Agreement Review",
         "iran nuclear agreement congressional review sanctions relief", 14, True),
        ("Veterans Health Care",
         "veterans health care accountability choice program", 7, True),
        ("Gun Control After Mass Shootings",
         "gun background checks no-fly list mass shooting legislation", 12, False),
    ],
    115: [
        ("Tax Cuts and Reform",
         "tax cuts corporate rate individual brackets reform", 19, True),
        ("Health Care Repeal Efforts",
         "repeal replace health insurance mandate subsidies", 21, False),
        ("Immigration and DACA",
         "daca dreamers border wall immigration enforcement", 17, False),
        ("Infrastructure Investment Proposals",
         "infrastructure plan roads bridges public private investment", 9, False),
        ("Opioid Epidemic Response",
         "opioid epidemic addiction treatment prescription fentanyl", 10, True),
        ("Banking Deregulation",
         "dodd-frank rollback community bank regulatory relief", 8, True),
        ("Defense Authorization and Spending",
         "defense authorization military readiness spending increase", 11, True),
        ("Farm and Nutrition Policy",
         "farm bill crop insurance nutrition assistance work requirements", 7, True),
    ],
    116: [
        ("Government Funding and Shutdowns",
         "government shutdown border wall appropriations continuing resolution", 20, True),
        ("Climate Change",
         "climate change green new deal emissions carbon", 15, False),
        ("Gun Control",
         "universal background checks red flag assault weapons", 13, False),
        ("COVID-19 Response and Relief",
         "coronavirus pandemic relief stimulus paycheck protection", 25, True),
        ("Police Reform and Racial Justice",
         "police reform qualified immunity chokehold racial justice", 14, False),
        ("War Powers and Foreign Policy",
         "war powers iran strike authorization military force", 9, True),
        ("Tech Regulation and Privacy",
         "technology privacy antitrust social media moderation", 8, True),
        ("Congressional Procedure and Reform",
         "remote voting proxy procedure modernization congress", 7, True),
        ("Healthcare Policy",
         "drug pricing surprise billing health coverage", 12, True),
        ("Presidential Impeachment",
         "impeachment articles ukraine inquiry senate trial", 22, False),
    ],
    117: [
        ("Pandemic Relief and Recovery",
         "pandemic rescue plan stimulus checks vaccination funding", 24, True),
        ("Infrastructure Investment",
         "bipartisan infrastructure bridges broadband transit jobs", 18, True),
        ("Semiconductor Manufacturing and Science",
         "semiconductor chips manufacturing research competitiveness", 9, True),
        ("Voting Rights and Election Reform",
         "voting rights election access federal standards filibuster", 16, False),
        ("Police Reform Negotiations",
         "police accountability negotiations qualified immunity stalled", 11, False),
        ("Immigration and Border Policy",
         "immigration pathway citizenship border encounters asylum", 13, False),
        ("Abortion and Reproductive Rights",
         "abortion rights codify roe state restrictions", 12, False),
        ("Labor Law Reform",
         "union organizing labor law collective bargaining", 7, False),
        ("Drug Pricing Standalone Reform",
         "prescription drug prices negotiation insulin cap standalone", 8, False),
        ("Big Tech Antitrust",
         "antitrust technology platforms self-preferencing competition", 9, False),
    ],
    118: [
        ("Debt Limit and Fiscal Policy",
         "debt ceiling fiscal responsibility spending caps default", 21, True),
        ("Government Funding Fights",
         "shutdown threat appropriations continuing resolution speaker", 19, True),
        ("Border Security and Immigration",
         "border security asylum parole enforcement migrants", 17, False),
        ("Foreign Aid and Ukraine",
         "ukraine israel taiwan supplemental foreign aid", 15, False),
        ("Defense Authorization",
         "defense authorization pay raise pacific deterrence", 8, True),
        ("Aviation Policy Reauthorization",
         "faa reauthorization air traffic pilots safety", 6, True),
        ("Gun Policy Stalemate",
         "gun legislation background checks stalled majority", 9, False),
        ("Tax Policy Extensions",
         "child tax credit business deductions extension package", 7, False),
    ],
}

ENACTED_STATUS = "Became Public Law"
PENDING_STATUS = "Not Enacted"


def f32(x: float) -> float:
    return float(np.float32(x))


def achieved_score(on_axis: float, b: float, c: float) -> float:
    a64, b64, c64 = f32(on_axis), f32(b), f32(c)
    return a64 / float(np.sqrt(a64 * a64 + b64 * b64 + c64 * c64))


def step_ulps(x: float, n: int) -> float:
    """Move a float32 value n ULPs (sign of n gives direction)."""
    v = np.float32(x)
    direction = np.float32(np.inf if n > 0 else -np.inf)
    for _ in range(abs(n)):
        v = np.nextafter(v, direction)
    return float(v)


def tune_components(target: float) -> tuple[float, float, float]:
    """Find float32 (a, b, c) whose float64 cosine against the axis is within
    1e-10 of target. Coarse-tune with b (ULP steps), fine-tune with small c."""
    a = f32(target)
    ideal_b = a * np.sqrt(1.0 / (target * target) - 1.0)
    best = None
    for db_ulps in range(-80, 81):
        b = step_ulps(ideal_b, db_ulps)
        if achieved_score(a, b, 0.0) < target:
            continue  # a nonzero c can only lower the score further
        # Solve target = a / sqrt(a^2 + b^2 + c^2) for c, then refine by ULPs.
        c_sq = (a / target) ** 2 - a * a - b * b
        c = f32(np.sqrt(c_sq)) if c_sq > 0 else 0.0
        for dc in range(-50, 51):
            cc = step_ulps(c, dc)
            if cc < 0:
                continue
            err = abs(achieved_score(a, b, cc) - target)
            if best is None or err < best[0]:
                best = (err, a, b, cc)
        if best and best[0] < 1e-10:
            break
    if best is None or best[0] >= 1e-10:
        raise SystemExit(f"could not tune components for target {target}: best={best}")
    return best[1], best[2], best[3]


def axis_vector(axis: int, a: float, b: float = 0.0, c: float = 0.0) -> list[float]:
    vec = [0.0] * DIM
    vec[axis] = f32(a)
    vec[SPARE1] = f32(b)
    vec[SPARE2] = f32(c)
    return vec


def unit(axis: int) -> list[float]:
    vec = [0.0] * DIM
    vec[axis] = 1.0
    return vec


def normalized_mix(axis: int, weight_axis: float, weight_spare: float) -> list[float]:
    norm = np.sqrt(weight_axis ** 2 + weight_spare ** 2)
    return axis_vector(axis, weight_axis / norm, weight_spare / norm)


def bill_fixture(congress: int, clusters) -> tuple[list[dict], list[dict]]:
    bills: list[dict] = []
    status_rows: list[dict] = []
    for i, (name, _query, _count, enacted_cluster) in enumerate(clusters):
        special = congress == 113 and name == "Immigration Reform"
        n_bills = 100 if special else 4
        enacted_rank = 36 if special else 2
        for j in range(n_bills):
            if special and j == 0:
                bill_id = "113-s-1"
                title = "Immigration Reform that Works for America's Future Act"
                a, b, c = tune_components(REFERENCE_SCORE)
                vector = axis_vector(i, a, b, c)
            else:
                bill_type = "hr" if j % 2 == 0 else "s"
                number = 1000 * (i + 1) + j + 1
                bill_id = f"{congress}-{bill_type}-{number}"
                title = f"{name} Act of {2013 + 2 * (congress - 113) + (j % 2)} (No. {j + 1})"
                score = (0.58 - 0.0018 * (j - 1)) if special else (0.57 - 0.004 * j)
                vector = axis_vector(i, score, np.sqrt(1 - score * score))
            is_enacted = enacted_cluster and j == enacted_rank
            status = ENACTED_STATUS if is_enacted else PENDING_STATUS
            bills.append({
                "doc_id": bill_id,
                "collection": "bills",
                "text": f"A bill addressing {name.lower()} in the {congress}th Congress, "
                        f"proposal {j + 1}.",
                "vector": vector,
                "metadata": {"congress": str(congress), "bill_id": bill_id, "title": title},
            })
            status_rows.append({"bill_id": bill_id, "enacted": str(is_enacted).lower(),
                                "status_text": status})
    return bills, status_rows


def article_fixture(congress: int, clusters) -> list[dict]:
    year_from = 2013 + 2 * (congress - 113)
    articles = []
    for i, (name, _query, _count, _enacted) in enumerate(clusters):
        for j in range(2):
            year = year_from + j
            articles.append({
                "doc_id": f"article-{congress}-{i}-{j}",
                "collection": "articles",
                "text": f"Coverage of the {name.lower()} debate in the {congress}th "
                        f"Congress, piece {j + 1}.",
                "vector": normalized_mix(i, 1.0, 1.0),
                "metadata": {"year": str(year), "month": str(3 + j),
                             "url": f"https://news.example/{congress}/{i}/{j}"},
            })
    return articles


def cluster_payload(congress: int, clusters) -> dict:
    out = []
    for name, query, count, _enacted in clusters:
        snippets = [
            f"Lawmakers spent much of the session arguing over {name.lower()}.",
            f"A new push on {name.lower()} ran into familiar procedural obstacles.",
            f"Advocates pressed the {congress}th Congress to act on {name.lower()}.",
        ]
        out.append({
            "name": name,
            "articles": snippets,
            "article_count": count,
            "summary": f"News coverage in the {congress}th Congress repeatedly returned "
                       f"to {name.lower()}, with sharp disagreement over how or whether "
                       f"to legislate.",
            "query": query,
        })
    return {"clusters": out}


def provider_script(congress: int, clusters) -> list[dict]:
    year_from = 2013 + 2 * (congress - 113)
    return [
        {"kind": "tool_calls", "calls": [{
            "call_id": "step1-search",
            "tool_name": "search_article_archives",
            "arguments": {
                "query_text": f"salient congressional policy debates {year_from} {year_from + 1}",
                "year_from": year_from,
                "year_to": year_from + 1,
                "top_k": 200,
            },
        }]},
        {"kind": "text", "text": json.dumps(cluster_payload(congress, clusters),
                                            ensure_ascii=False)},
    ]


def embeddings_fixture(congress: int, clusters) -> dict[str, list[float]]:
    year_from = 2013 + 2 * (congress - 113)
    recordings = {
        f"salient congressional policy debates {year_from} {year_from + 1}": unit(SPARE1),
    }
    for i, (_name, query, _count, _enacted) in enumerate(clusters):
        recordings[query] = unit(i)
    return recordings


def main() -> None:
    for congress, clusters in CONGRESSES.items():
        cdir = OUT / str(congress)
        cdir.mkdir(parents=True, exist_ok=True)

        bills, status_rows = bill_fixture(congress, clusters)
        with (cdir / "bills.jsonl").open("w", encoding="utf-8") as f:
            for doc in bills:
                f.write(json.dumps(doc, ensure_ascii=False) + "\n")
        with (cdir / "articles.jsonl").open("w", encoding="utf-8") as f:
            for doc in article_fixture(congress, clusters):
                f.write(json.dumps(doc, ensure_ascii=False) + "\n")
        with (cdir / "bill_status.csv").open("w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=["bill_id", "enacted", "status_text"])
            writer.writeheader()
            writer.writerows(status_rows)
        with (cdir / "provider.jsonl").open("w", encoding="utf-8") as f:
            for step in provider_script(congress, clusters):
                f.write(json.dumps(step, ensure_ascii=False) + "\n")
        (cdir / "embeddings.json").write_text(
            json.dumps(embeddings_fixture(congress, clusters), ensure_ascii=False, indent=1),
            encoding="utf-8")
        print(f"congress {congress}: {len(clusters)} clusters, {len(bills)} bills")

    # Sanity-check the tuned reference score.
    a, b, c = tune_components(REFERENCE_SCORE)
    err = abs(achieved_score(a, b, c) - REFERENCE_SCORE)
    print(f"reference score tuning error: {err:.2e}")
    if err >= 1e-10:
        sys.exit("reference score tuning failed")


if __name__ == "__main__":
    main()
