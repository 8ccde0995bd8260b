"""Command line entry points: analyze, export-scene, stats, serve.

Exit codes: 0 success, 1 internal failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from .ingest import ClassifyConfig, IngestError
from .pipeline import PipelineOptions, run_analysis
from .store import NotDone, NotFound, Store

USAGE_ERROR = 2
INTERNAL_ERROR = 1


def _parse_until(value: str) -> int:
    """ISO date/datetime → inclusive unix cutoff (end of day for bare dates)."""
    try:
        if "T" in value:
            dt = datetime.fromisoformat(value)
        else:
            dt = datetime.fromisoformat(value + "T23:59:59")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an ISO date: {value}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evocity",
        description="Mine a git repository into evolving 3D city scenes.",
    )
    parser.add_argument("--data-dir", default="evocity-data",
                        help="store directory (default: ./evocity-data)")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full analysis synchronously")
    analyze.add_argument("url", help="repository URL or local path")
    analyze.add_argument("--branch", default=None)
    analyze.add_argument("--db-type", default="generic",
                         choices=["generic", "sqlite", "mysql", "postgres"])
    analyze.add_argument("--until", type=_parse_until, default=None, metavar="DATE",
                         help="ignore commits after this ISO date")
    analyze.add_argument("--classify-config", default=None, metavar="FILE",
                         help="JSON file overriding extension classification")
    analyze.add_argument("--json", action="store_true", dest="as_json")
    analyze.add_argument("--quiet", action="store_true")

    export = sub.add_parser("export-scene", help="write one stored scene document")
    export.add_argument("project", help="project id")
    export.add_argument("ordinal", type=int)
    export.add_argument("-o", "--output", default="-", help="file path or - for stdout")

    stats = sub.add_parser("stats", help="per-kind entity counts for a stored project")
    stats.add_argument("project", help="project id")
    stats.add_argument("--ordinal", type=int, default=None,
                       help="commit ordinal (default: head)")
    stats.add_argument("--json", action="store_true", dest="as_json")

    serve = sub.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--bind", default=None, metavar="HOST:PORT")
    return parser


def _cmd_analyze(args: argparse.Namespace) -> int:
    data_store = Store(args.data_dir)
    classify = ClassifyConfig()
    if args.classify_config:
        try:
            classify = ClassifyConfig.from_file(args.classify_config)
        except (OSError, ValueError) as exc:
            print(f"error: bad classify config: {exc}", file=sys.stderr)
            return USAGE_ERROR
    progress = None if args.quiet else lambda msg: print(f"  {msg}", file=sys.stderr)
    options = PipelineOptions(
        branch=args.branch, db_type=args.db_type,
        until_timestamp=args.until, classify=classify, progress=progress,
    )
    try:
        result = run_analysis(args.url, data_store, options)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    record = result.record
    if args.as_json:
        print(json.dumps({
            "project_id": record.project_id,
            "status": record.status,
            "num_commits": record.num_commits,
            "head": record.head,
        }))
    else:
        print(record.project_id)
    return 0


def _cmd_export_scene(args: argparse.Namespace) -> int:
    data_store = Store(args.data_dir)
    try:
        raw = data_store.load_scene_bytes(args.project, args.ordinal)
    except (NotFound, NotDone) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if args.output == "-":
        sys.stdout.buffer.write(raw)
    else:
        Path(args.output).write_bytes(raw)
    return 0


def _stats_at(data_store: Store, project: str, ordinal: int | None) -> dict:
    manifest = data_store.load_manifest(project)
    if manifest is None:
        raise NotFound(f"unknown project: {project}")
    num_scenes = len(manifest["scenes"])
    if ordinal is None:
        ordinal = num_scenes - 1
    if num_scenes == 0:
        return {"ordinal": -1, "class_files": 0, "classes": 0, "data_files": 0,
                "binaries": 0, "other_files": 0, "tables": 0}
    if ordinal < 0 or ordinal >= num_scenes:
        raise NotFound(f"scene ordinal out of range: {ordinal}")

    entities = data_store.load_document(project, "entities")
    counts = {"class_files": 0, "classes": 0, "data_files": 0, "binaries": 0,
              "other_files": 0}
    for entity in entities["entities"]:
        if entity["kind"] == "Folder":
            continue
        latest = None
        for version in entity["versions"]:
            if version["ordinal"] > ordinal:
                break
            latest = version
        if latest is None or latest["change"] == "Deleted":
            continue
        kind = latest["kind"]
        if kind == "SourceClassContainer":
            num_classes = latest["metrics"].get("num_classes", 0)
            counts["classes"] += num_classes
            if num_classes >= 1:
                counts["class_files"] += 1
        elif kind == "DataFile":
            counts["data_files"] += 1
        elif kind == "BinaryFile":
            counts["binaries"] += 1
        else:
            counts["other_files"] += 1

    schema_doc = data_store.load_document(project, "schema")
    tables = 0
    for table in schema_doc["tables"]:
        for start, end in table["intervals"]:
            if start <= ordinal and (end is None or ordinal < end):
                tables += 1
                break
    return {"ordinal": ordinal, **counts, "tables": tables}


def _cmd_stats(args: argparse.Namespace) -> int:
    data_store = Store(args.data_dir)
    try:
        stats = _stats_at(data_store, args.project, args.ordinal)
    except (NotFound, NotDone) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if args.as_json:
        print(json.dumps(stats, sort_keys=True))
        return 0
    print(f"commit ordinal   {stats['ordinal']}")
    print(f"class files      {stats['class_files']}")
    print(f"classes          {stats['classes']}")
    print(f"data files       {stats['data_files']}")
    print(f"binaries         {stats['binaries']}")
    print(f"other files      {stats['other_files']}")
    print(f"tables           {stats['tables']}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import bind_address, create_app

    if args.bind:
        host, _, port_text = args.bind.rpartition(":")
        host = host or "127.0.0.1"
        try:
            port = int(port_text)
        except ValueError:
            print(f"error: bad --bind value: {args.bind}", file=sys.stderr)
            return USAGE_ERROR
    else:
        host, port = bind_address()
    app = create_app(args.data_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"error: cannot serve on {host}:{port}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "export-scene":
            return _cmd_export_scene(args)
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "serve":
            return _cmd_serve(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR
    return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
