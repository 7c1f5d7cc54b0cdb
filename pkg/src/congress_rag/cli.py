"""Command-line entry point.

Subcommands: serve, ingest (bills|articles|tables), run, series,
trace (export), ask. Settings resolve with the precedence

    command-line flag > CONGRESS_RAG_* environment variable > config file

where the config file is JSON, located via --config or CONGRESS_RAG_CONFIG.
Exit codes: 0 success, 1 runtime failure, 2 usage/configuration error
(notably a missing replay cassette directory, which is reported with its
path).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

from .agent.loop import Conversation, run_turn
from .agent.providers import HttpChatProvider, ScriptedProvider
from .embeddings import HashEmbedder
from .errors import NotFoundError
from .ingestion import ingest_articles, ingest_bill_summaries
from .pipeline import PipelineConfig, series_to_csv, series_to_svg
from .relational import RelationalStore, TABLE_COLUMNS
from .replay import build_replay_pipeline
from .trace import TraceRecorder
from .vectorstore import VectorStore

ENV_PREFIX = "CONGRESS_RAG_"

SETTING_DEFAULTS = {
    "cassette": "fixtures/replay",
    "runs_dir": "var/runs",
    "trace_dir": "var/trace",
    "data_dir": "var/data",
    "host": "127.0.0.1",
    "port": "8000",
    "threshold": "0.4",
    "dimension": "64",
}


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


def _load_config_file(path: str | None) -> dict[str, Any]:
    path = path or os.environ.get(ENV_PREFIX + "CONFIG")
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise CliError(f"config file not found: {p}", exit_code=2)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError(f"config file {p} is not valid JSON: {exc}", exit_code=2)
    if not isinstance(doc, dict):
        raise CliError(f"config file {p} must hold a JSON object", exit_code=2)
    return doc


class Settings:
    """flag > environment > config file > default."""

    def __init__(self, args: argparse.Namespace, config: dict[str, Any]):
        self._args = args
        self._config = config

    def get(self, name: str) -> str:
        flag = getattr(self._args, name, None)
        if flag is not None:
            return str(flag)
        env = os.environ.get(ENV_PREFIX + name.upper())
        if env is not None:
            return env
        if name in self._config:
            return str(self._config[name])
        return SETTING_DEFAULTS[name]


def _require_cassette(settings: Settings) -> Path:
    cassette = Path(settings.get("cassette"))
    if not cassette.is_dir():
        raise CliError(f"cassette directory not found: {cassette}", exit_code=2)
    return cassette


def _build_pipeline(settings: Settings, no_review: bool = False):
    cassette = _require_cassette(settings)
    config = PipelineConfig(threshold=float(settings.get("threshold")),
                            no_review=no_review)
    return build_replay_pipeline(cassette, settings.get("runs_dir"),
                                 settings.get("trace_dir"), config=config)


def _open_data_stores(settings: Settings) -> tuple[VectorStore, RelationalStore, HashEmbedder]:
    data_dir = Path(settings.get("data_dir"))
    data_dir.mkdir(parents=True, exist_ok=True)
    dimension = int(settings.get("dimension"))
    store = VectorStore()
    store.create("bills", dimension, data_dir / "bills.avec")
    store.create("articles", dimension, data_dir / "articles.avec")
    relational = RelationalStore(data_dir / "relational.db")
    return store, relational, HashEmbedder(dimension=dimension)


class _FileArchiveClient:
    """Adapter that serves a local JSONL article dump as an archive API."""

    def __init__(self, path: Path):
        self._articles: list[dict[str, Any]] = []
        with path.open(encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    self._articles.append(json.loads(line))

    def fetch_article_archive(self, year: int, month: int) -> list[dict[str, Any]]:
        return [a for a in self._articles
                if int(a.get("year", 0)) == year and int(a.get("month", 0)) == month]


# --- subcommand handlers ------------------------------------------------------

def _cmd_serve(args: argparse.Namespace, settings: Settings) -> int:
    import uvicorn

    from .service import ServiceState, create_app

    pipeline = _build_pipeline(settings)
    state = ServiceState(pipeline)
    app = create_app(state)
    uvicorn.run(app, host=settings.get("host"), port=int(settings.get("port")))
    return 0


def _progress_printer(as_json: bool):
    def emit(event: dict) -> None:
        if as_json:
            print(json.dumps(event))
        elif event.get("event") == "batch":
            print(f"  ... {event['done']} embedded", file=sys.stderr)
    return emit


def _cmd_ingest(args: argparse.Namespace, settings: Settings) -> int:
    store, relational, embedder = _open_data_stores(settings)
    progress = _progress_printer(args.json)
    if args.what == "bills":
        stats = ingest_bill_summaries(args.input, store.get("bills"), embedder,
                                      progress=progress)
    elif args.what == "articles":
        client = _FileArchiveClient(Path(args.input))
        stats = ingest_articles(client, store.get("articles"), embedder,
                                year_range=(args.year_from, args.year_to),
                                progress=progress)
    else:  # tables
        if args.table not in TABLE_COLUMNS:
            raise CliError(f"unknown table {args.table!r}; expected one of "
                           f"{', '.join(sorted(TABLE_COLUMNS))}", exit_code=2)
        rows = relational.ingest_table(args.input, args.table)
        stats = {"table": args.table, "rows": rows}
    print(json.dumps(stats))
    return 0


def _cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    pipeline = _build_pipeline(settings, no_review=args.no_review)
    run = pipeline.run_congress(args.congress)
    doc = run.to_json()
    summary = {
        "run_id": doc["run_id"],
        "congress": doc["congress"],
        "state": doc["state"],
        "clusters": len(doc["clusters"]),
        "result": doc["result"],
        "warnings": doc["warnings"],
    }
    print(json.dumps(summary, indent=2))
    return 0


def _cmd_series(args: argparse.Namespace, settings: Settings) -> int:
    pipeline = _build_pipeline(settings, no_review=True)
    results = pipeline.run_series(args.from_congress, args.to_congress)
    rendered = series_to_csv(results) if args.out == "csv" else series_to_svg(results)
    if args.output:
        Path(args.output).write_text(rendered, encoding="utf-8")
        print(json.dumps({"written": args.output, "congresses": len(results)}))
    else:
        print(rendered, end="" if rendered.endswith("\n") else "\n")
    return 0


def _cmd_trace(args: argparse.Namespace, settings: Settings) -> int:
    recorder = TraceRecorder(settings.get("trace_dir"))
    fmt = "jsonl" if args.format == "jsonl" else "html_report"
    try:
        rendered = recorder.export(args.run, fmt)
    except NotFoundError as exc:
        raise CliError(str(exc), exit_code=1)
    if args.output:
        Path(args.output).write_text(rendered, encoding="utf-8")
        print(json.dumps({"written": args.output}))
    else:
        print(rendered, end="" if rendered.endswith("\n") else "\n")
    return 0


def _cmd_ask(args: argparse.Namespace, settings: Settings) -> int:
    pipeline = _build_pipeline(settings)
    if args.provider_script:
        provider = ScriptedProvider.from_jsonl(args.provider_script)
    elif os.environ.get("AGENT_PROVIDER_URL"):
        provider = HttpChatProvider(os.environ["AGENT_PROVIDER_URL"],
                                    model=args.model or "default")
    else:
        raise CliError("no chat provider: pass --provider-script or set "
                       "AGENT_PROVIDER_URL", exit_code=2)
    conversation = Conversation.new(
        "You are a congressional research assistant. Use the available tools "
        "to ground every claim in retrieved data.")
    outcome = run_turn(conversation, args.prompt, pipeline.registry, provider,
                       max_iterations=pipeline.config.max_iterations,
                       tracer=pipeline.tracer)
    if args.json:
        print(json.dumps(outcome.to_json(), indent=2))
    else:
        print(outcome.final_text if outcome.kind == "answered"
              else f"[turn ended: {outcome.kind}]")
    return 0 if outcome.kind == "answered" else 1


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="congress-rag")
    parser.add_argument("--config", help="path to a JSON config file")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output and errors")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cassette", help="replay fixture directory")
        p.add_argument("--runs-dir", dest="runs_dir")
        p.add_argument("--trace-dir", dest="trace_dir")

    p = sub.add_parser("serve", help="start the HTTP API")
    common(p)
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("ingest", help="load documents or tables into the stores")
    p.add_argument("what", choices=["bills", "articles", "tables"])
    p.add_argument("--input", required=True)
    p.add_argument("--data-dir", dest="data_dir")
    p.add_argument("--dimension", type=int)
    p.add_argument("--table", help="target table for `ingest tables`")
    p.add_argument("--year-from", dest="year_from", type=int, default=2013)
    p.add_argument("--year-to", dest="year_to", type=int, default=2024)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("run", help="run the measurement pipeline for one Congress")
    common(p)
    p.add_argument("--congress", type=int, required=True)
    p.add_argument("--no-review", action="store_true")
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("series", help="score a range of Congresses")
    common(p)
    p.add_argument("--from", dest="from_congress", type=int, required=True)
    p.add_argument("--to", dest="to_congress", type=int, required=True)
    p.add_argument("--out", choices=["csv", "svg"], default="csv")
    p.add_argument("--output", help="write to a file instead of stdout")
    p.set_defaults(func=_cmd_series)

    p = sub.add_parser("trace", help="trace utilities")
    trace_sub = p.add_subparsers(dest="trace_command", required=True)
    pe = trace_sub.add_parser("export", help="export one scope's trace")
    pe.add_argument("--run", required=True, help="run or session id")
    pe.add_argument("--format", choices=["jsonl", "html"], default="jsonl")
    pe.add_argument("--output")
    pe.add_argument("--trace-dir", dest="trace_dir")
    pe.set_defaults(func=_cmd_trace)

    p = sub.add_parser("ask", help="one agent turn against the stores")
    common(p)
    p.add_argument("prompt")
    p.add_argument("--provider-script", dest="provider_script",
                   help="scripted provider JSONL (offline)")
    p.add_argument("--model")
    p.set_defaults(func=_cmd_ask)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config_file(args.config)
        settings = Settings(args, config)
        return args.func(args, settings)
    except CliError as exc:
        _report_error(str(exc), exc.exit_code, args.json)
        return exc.exit_code
    except Exception as exc:  # surface anything else as a runtime failure
        _report_error(f"{type(exc).__name__}: {exc}", 1, getattr(args, "json", False))
        return 1


def _report_error(message: str, exit_code: int, as_json: bool) -> None:
    if as_json:
        print(json.dumps({"error": message, "exit_code": exit_code}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
