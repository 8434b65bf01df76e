"""Command-line entry point.

Subcommands: ingest logs into a project, validate a log file, run the
analysis tasks headlessly, generate scripted test scenarios, and launch
the HTTP service. Exit codes: 0 success, 1 usage error, 2 data error,
so CI pipelines can gate on validation.

LVL_DATA_DIR sets the default data directory, LVL_PORT the default
service port.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from pathlib import Path

from . import analysis, testkit
from .errors import WorkbenchError
from .ingest import IngestReport, ingest_log_file, parse_video_manifest
from .project_store import Project, ProjectStore
from .serialize import (
    canonical_json,
    ingest_report_to_wire,
    key_interval_to_wire,
    notification_events_to_wire,
    session_report_to_wire,
    transition_count_to_wire,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are 1 here
        raise _UsageError(message)


def _default_data_dir() -> Path:
    return Path(os.environ.get("LVL_DATA_DIR", "lvlinker-data"))


def _slug(text: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return slug or "project"


def _print_report(report: IngestReport, as_json: bool) -> None:
    if as_json:
        print(canonical_json(ingest_report_to_wire(report)).decode())
        return
    print(f"accepted: {report.records_accepted}")
    print(f"rejected: {report.records_rejected}")
    for line_number, reason in report.rejections:
        print(f"  line {line_number}: {reason}")
    if report.time_span:
        print(f"time span: {report.time_span[0]} .. {report.time_span[1]} ms")


def _cmd_ingest(args) -> int:
    data = Path(args.log).read_bytes()
    dataset, report = ingest_log_file(data)
    name = args.project or Path(args.log).stem
    project = Project(
        project_id=_slug(name),
        name=name,
        log_source_path=str(Path(args.log).resolve()),
        source_digest=dataset.source_digest,
    )
    if args.manifest:
        project.videos = parse_video_manifest(Path(args.manifest).read_bytes())
        if project.videos:
            project.active_video_id = project.videos[0].video_id
    store = ProjectStore(args.data_dir / "projects")
    revision = store.save(project)
    _print_report(report, args.json)
    if not args.json:
        print(f"project: {project.project_id} (revision {revision})")
    return EXIT_OK


def _cmd_validate(args) -> int:
    data = Path(args.log).read_bytes()
    _, report = ingest_log_file(data)
    _print_report(report, args.json)
    return EXIT_OK if report.records_rejected == 0 else EXIT_DATA


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


def _cmd_analyze(args) -> int:
    store = ProjectStore(args.data_dir / "projects")
    project, _ = store.load(args.project)
    if not project.log_source_path:
        raise WorkbenchError(f"project {args.project} has no log data")
    with open(project.log_source_path, "rb") as f:
        dataset, _ = ingest_log_file(f)

    range_ms = None
    if args.from_ms is not None or args.to_ms is not None:
        range_ms = (
            args.from_ms if args.from_ms is not None else 0,
            args.to_ms if args.to_ms is not None else (1 << 62),
        )

    def require(value, flag: str):
        if value is None:
            raise _UsageError(f"--task {args.task} needs {flag}")
        return value

    if args.task == "typing-interval":
        result = analysis.typing_interval(
            dataset,
            require(args.package, "--package"),
            require(args.key_a, "--key-a"),
            require(args.key_b, "--key-b"),
            args.occurrence,
            range_ms,
        )
        wire = key_interval_to_wire(result)
        header = ["firstRecordId", "secondRecordId", "firstKey", "secondKey", "intervalMs"]
        rows = [[wire[h] for h in header]]
        human = f"interval: {result.interval_ms} ms (records {result.first_record_id} -> {result.second_record_id})"
    elif args.task == "transitions":
        count = analysis.app_transition_count(
            dataset, require(args.a, "--a"), require(args.b, "--b"), range_ms
        )
        wire = transition_count_to_wire(count)
        header = ["count"]
        rows = [[count]]
        human = f"transitions: {count}"
    elif args.task == "notifications":
        events = analysis.notification_events(dataset, require(args.package, "--package"), range_ms)
        wire = notification_events_to_wire(events)
        header = ["recordId", "timestampMs", "packageName", "isPosted"]
        rows = [[e["recordId"], e["timestampMs"], e["packageName"], e["isPosted"]] for e in wire]
        human = "\n".join(
            f"{e['timestampMs']}  {'posted' if e['isPosted'] else 'removed'}  {e['packageName']}"
            for e in wire
        ) or "no notification events"
    elif args.task == "sessions":
        report = analysis.app_sessions(dataset, require(args.package, "--package"), range_ms)
        wire = session_report_to_wire(report)
        header = ["packageName", "startRecordId", "endRecordId", "startMs", "endMs"]
        rows = [
            [s["packageName"], s["startRecordId"], s["endRecordId"], s["startMs"], s["endMs"]]
            for s in wire["sessions"]
        ]
        human = "\n".join(
            f"{s['startMs']} .. {s['endMs'] if s['endMs'] is not None else 'open'}"
            for s in wire["sessions"]
        ) or "no sessions"
        for o in wire["orphans"]:
            print(f"warning: orphan close at {o['timestampMs']} ({o['kind']})", file=sys.stderr)
    else:  # unreachable: argparse restricts choices
        raise _UsageError(f"unknown task {args.task}")

    if args.json:
        print(canonical_json(wire).decode())
    else:
        print(human)
    if args.csv:
        _write_csv(args.csv, header, rows)
    return EXIT_OK


def _cmd_gen(args) -> int:
    script = testkit.ScenarioScript(args.scenario, args.seed, args.start_epoch_ms)
    generated = testkit.generate_scenario(script)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "log.jsonl").write_bytes(generated.jsonl_bytes())
    (out / "manifest.json").write_text(testkit.manifest_json([generated.video]) + "\n")
    (out / "truth.json").write_text(
        json.dumps(generated.truth, indent=2, sort_keys=True) + "\n"
    )
    if args.json:
        print(canonical_json({"out": str(out), "videoId": generated.video.video_id}).decode())
    else:
        print(f"wrote {out}/log.jsonl, manifest.json, truth.json")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(args.data_dir, base_path=args.base_path, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lvlinker", description=__doc__)
    parser.add_argument("--json", action="store_true", help="machine-readable output and errors")
    parser.add_argument(
        "--data-dir",
        type=Path,
        default=_default_data_dir(),
        help="projects/logs directory (env LVL_DATA_DIR)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a log file into a new project")
    p.add_argument("log")
    p.add_argument("--manifest", help="video manifest JSON to attach")
    p.add_argument("--project", help="project name (default: log file stem)")
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("validate", help="parse a log file and report rejects")
    p.add_argument("log")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("analyze", help="run one analysis task on a project")
    p.add_argument("project")
    p.add_argument(
        "--task",
        required=True,
        choices=["typing-interval", "transitions", "notifications", "sessions"],
    )
    p.add_argument("--package", help="package name for typing/notifications/sessions")
    p.add_argument("--key-a", help="first key (typing-interval)")
    p.add_argument("--key-b", help="second key (typing-interval)")
    p.add_argument("--occurrence", type=int, default=1)
    p.add_argument("--a", help="first package (transitions)")
    p.add_argument("--b", help="second package (transitions)")
    p.add_argument("--from-ms", type=int, default=None)
    p.add_argument("--to-ms", type=int, default=None)
    p.add_argument("--csv", help="also write the result as CSV")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("gen", help="generate a scripted scenario fixture")
    p.add_argument("--scenario", required=True, choices=list(testkit.SCENARIO_KINDS))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--start-epoch-ms", type=int, default=testkit.DEFAULT_START_EPOCH_MS)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("LVL_PORT", "8765")))
    p.add_argument("--base-path", default="")
    p.add_argument("--ui", help="directory with the built browser UI (served at /ui)")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    as_json = False
    try:
        args = parser.parse_args(argv)
        as_json = args.json
        return args.fn(args)
    except _UsageError as e:
        _emit_error("Usage", str(e), as_json)
        return EXIT_USAGE
    except ValueError as e:  # bad task parameters (equal packages, occurrence < 1)
        _emit_error("Usage", str(e), as_json)
        return EXIT_USAGE
    except WorkbenchError as e:
        _emit_error(type(e).__name__, str(e), as_json)
        return EXIT_DATA
    except OSError as e:
        _emit_error("Io", str(e), as_json)
        return EXIT_DATA


def _emit_error(kind: str, message: str, as_json: bool) -> None:
    if as_json:
        print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
