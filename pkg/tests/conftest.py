import random
from pathlib import Path

import pytest

from congress_rag.models import BillMatch, ClusterReport, PolicyCluster, parse_bill_id
from congress_rag.pipeline import PipelineConfig
from congress_rag.replay import build_replay_pipeline

REPO_ROOT = Path(__file__).resolve().parents[1]
REPLAY_ROOT = REPO_ROOT / "fixtures" / "replay"


@pytest.fixture
def replay_pipeline(tmp_path):
    return build_replay_pipeline(REPLAY_ROOT, tmp_path / "runs", tmp_path / "trace")


@pytest.fixture
def replay_pipeline_no_review(tmp_path):
    return build_replay_pipeline(REPLAY_ROOT, tmp_path / "runs", tmp_path / "trace",
                                 config=PipelineConfig(no_review=True))


def make_cluster(name: str = "Test Cluster", query: str = "test query") -> PolicyCluster:
    return PolicyCluster(name=name, summary="s", article_refs=("a1",),
                         article_count=1, query=query)


def random_report(rng: random.Random, name: str) -> ClusterReport:
    n = rng.randint(0, 12)
    matches = []
    for j in range(n):
        matches.append(BillMatch(
            bill_id=parse_bill_id(f"113-hr-{j + 1}"),
            title=f"Bill {j + 1}",
            score=round(rng.uniform(-1.0, 1.0), 6),
            enacted=rng.random() < 0.3,
            status="Became Public Law" if rng.random() < 0.3 else "Not Enacted",
            included=rng.random() < 0.9,
        ))
    threshold = round(rng.uniform(-1.0, 1.0), 6)
    return ClusterReport.build(make_cluster(name), threshold, matches)
