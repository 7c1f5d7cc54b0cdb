import json

import pytest

from congress_rag.cli import main

from conftest import REPLAY_ROOT


def run_cli(*argv):
    return main(list(argv))


def common_args(tmp_path):
    return ["--cassette", str(REPLAY_ROOT),
            "--runs-dir", str(tmp_path / "runs"),
            "--trace-dir", str(tmp_path / "trace")]


def test_run_subcommand(tmp_path, capsys):
    code = run_cli("run", "--congress", "113", "--no-review", *common_args(tmp_path))
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["state"] == "finalized"
    assert doc["result"]["score"] == 0.5


def test_missing_cassette_exits_2_with_path(tmp_path, capsys):
    code = run_cli("run", "--congress", "113", "--cassette", str(tmp_path / "nope"))
    assert code == 2
    assert "nope" in capsys.readouterr().err


def test_series_csv(tmp_path, capsys):
    code = run_cli("series", "--from", "113", "--to", "118", "--out", "csv",
                   *common_args(tmp_path))
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "congress,score"
    assert lines[1:] == ["113,0.5", "114,0.1", "115,0.375", "116,0.4",
                         "117,0.7", "118,0.5"]


def test_series_svg_to_file(tmp_path, capsys):
    out = tmp_path / "chart.svg"
    code = run_cli("series", "--from", "113", "--to", "114", "--out", "svg",
                   "--output", str(out), *common_args(tmp_path))
    assert code == 0
    svg = out.read_text(encoding="utf-8")
    assert svg.count("<rect") == 2


def test_trace_export(tmp_path, capsys):
    run_cli("run", "--congress", "113", "--no-review", *common_args(tmp_path))
    run_id = json.loads(capsys.readouterr().out)["run_id"]

    code = run_cli("trace", "export", "--run", run_id, "--format", "jsonl",
                   "--trace-dir", str(tmp_path / "trace"))
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert all(json.loads(l)["scope_id"] == run_id for l in lines)

    out = tmp_path / "audit.html"
    code = run_cli("trace", "export", "--run", run_id, "--format", "html",
                   "--output", str(out), "--trace-dir", str(tmp_path / "trace"))
    assert code == 0
    assert out.read_text(encoding="utf-8").startswith("<!doctype html>")

    assert run_cli("trace", "export", "--run", "missing",
                   "--trace-dir", str(tmp_path / "trace")) == 1


def test_ask_with_provider_script(tmp_path, capsys):
    script = tmp_path / "provider.jsonl"
    script.write_text(json.dumps({"kind": "text", "text": "answer!"}) + "\n",
                      encoding="utf-8")
    code = run_cli("ask", "what is going on?", "--provider-script", str(script),
                   *common_args(tmp_path))
    assert code == 0
    assert capsys.readouterr().out.strip() == "answer!"


def test_ask_without_provider_exits_2(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("AGENT_PROVIDER_URL", raising=False)
    code = run_cli("ask", "anything", *common_args(tmp_path))
    assert code == 2


def test_ingest_tables_and_bills(tmp_path, capsys):
    csv_path = tmp_path / "bill_status.csv"
    csv_path.write_text("bill_id,enacted,status_text\n113-s-1,1,Law\n",
                        encoding="utf-8")
    code = run_cli("ingest", "tables", "--table", "bill_status",
                   "--input", str(csv_path), "--data-dir", str(tmp_path / "data"))
    assert code == 0
    assert json.loads(capsys.readouterr().out) == {"table": "bill_status", "rows": 1}

    bills = tmp_path / "bills.jsonl"
    bills.write_text(json.dumps({"bill_id": "113-hr-1", "summary": "s"}) + "\n",
                     encoding="utf-8")
    code = run_cli("ingest", "bills", "--input", str(bills),
                   "--data-dir", str(tmp_path / "data"))
    assert code == 0
    assert json.loads(capsys.readouterr().out)["bills_embedded"] == 1


def test_config_file_and_env_precedence(tmp_path, monkeypatch, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"cassette": str(tmp_path / "config-nope")}),
                      encoding="utf-8")
    # Config file points at a missing directory -> exit 2 naming that path.
    code = run_cli("--config", str(config), "run", "--congress", "113")
    assert code == 2
    assert "config-nope" in capsys.readouterr().err

    # Environment beats the config file.
    monkeypatch.setenv("CONGRESS_RAG_CASSETTE", str(tmp_path / "env-nope"))
    code = run_cli("--config", str(config), "run", "--congress", "113")
    assert code == 2
    assert "env-nope" in capsys.readouterr().err

    # A flag beats both.
    code = run_cli("--config", str(config), "run", "--congress", "113",
                   "--no-review", "--cassette", str(REPLAY_ROOT),
                   "--runs-dir", str(tmp_path / "runs"),
                   "--trace-dir", str(tmp_path / "trace"))
    assert code == 0


def test_json_error_reporting(tmp_path, capsys):
    code = run_cli("--json", "run", "--congress", "113",
                   "--cassette", str(tmp_path / "gone"))
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["exit_code"] == 2
    assert "gone" in err["error"]
