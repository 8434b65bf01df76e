"""HTTP service exposing the workbench core to the browser UI.

Thin adapters only: every endpoint serializes the result of the
corresponding core call with the canonical encoder, so responses are
byte-identical to driving the core directly. Datasets are immutable
and cached per project; project writes go through the store's
optimistic revisions (If-Match header carries the token).

Cursor linking happens server-side: while a project is linked, a video
cursor update computes the highlighted record and a log cursor update
computes the video seek position; unlinked cursors are relayed without
any cross-computation. Connected clients receive every cursor state in
order on a per-project server-sent-events channel.
"""

from __future__ import annotations

import asyncio
import mimetypes
import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, APIRouter, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse

from . import _kernels, analysis, sync
from .errors import (
    AnchorOutOfVideoError,
    BadValueError,
    ConflictingRevisionError,
    EmptyInputError,
    KeyPairNotFoundError,
    MalformedJsonError,
    MissingFieldError,
    OutOfVideoRangeError,
    OverlappingScriptsError,
    UnknownColumnError,
    UnknownProjectError,
    UnknownRecordError,
    UnknownVideoError,
    WorkbenchError,
)
from .filtering import FilterSpec, apply_filter, distinct_values
from .ingest import ingest_log_file, parse_video_manifest
from .model import LogDataset, LogRecord, AppUsagePayload, KeyLogPayload, NotificationPayload
from .project_store import (
    Project,
    ProjectStore,
    export_task_sheet,
    project_from_wire,
    project_to_wire,
)
from .serialize import (
    canonical_json,
    ingest_report_to_wire,
    key_interval_to_wire,
    notification_events_to_wire,
    row_to_wire,
    session_report_to_wire,
    transition_count_to_wire,
    video_to_wire,
)

_STATUS_BY_ERROR = {
    MalformedJsonError: 400,
    MissingFieldError: 400,
    BadValueError: 400,
    UnknownColumnError: 400,
    OutOfVideoRangeError: 400,
    AnchorOutOfVideoError: 400,
    OverlappingScriptsError: 400,
    UnknownRecordError: 404,
    UnknownProjectError: 404,
    UnknownVideoError: 404,
    KeyPairNotFoundError: 404,
    ConflictingRevisionError: 409,
    EmptyInputError: 422,
}


def _error_body(exc: WorkbenchError) -> dict:
    name = type(exc).__name__
    body = {"error": name[:-5] if name.endswith("Error") else name, "message": str(exc)}
    if isinstance(exc, OutOfVideoRangeError):
        body["videoTimeMs"] = exc.video_time_ms
        body["durationMs"] = exc.duration_ms
    if isinstance(exc, KeyPairNotFoundError):
        body["missingKey"] = exc.missing_key
    if isinstance(exc, EmptyInputError) and exc.report is not None:
        body["report"] = ingest_report_to_wire(exc.report)
    return body


class _Channel:
    """Fan-out of cursor states to a project's subscribers, in order."""

    def __init__(self):
        self.subscribers: set[asyncio.Queue] = set()
        self.last: Optional[dict] = None

    def publish(self, msg: dict) -> None:
        self.last = msg
        for q in list(self.subscribers):
            q.put_nowait(msg)

    async def stream(self):
        q: asyncio.Queue = asyncio.Queue()
        self.subscribers.add(q)
        try:
            if self.last is not None:
                yield self.last
            while True:
                yield await q.get()
        finally:
            self.subscribers.discard(q)


class _Runtime:
    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.store = ProjectStore(self.data_dir / "projects")
        self.logs_dir = self.data_dir / "logs"
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        self.datasets: dict[str, tuple[tuple[int, int], LogDataset]] = {}
        self.channels: dict[str, _Channel] = {}

    def channel(self, project_id: str) -> _Channel:
        ch = self.channels.get(project_id)
        if ch is None:
            ch = self.channels[project_id] = _Channel()
        return ch

    def project(self, project_id: str) -> tuple[Project, str]:
        return self.store.load(project_id)

    def dataset(self, project: Project) -> LogDataset:
        """Dataset for a project, (re)loaded whenever the file changes.

        The cache key is the source file's (mtime, size), so an edited
        log is picked up on the next request.
        """
        if project.log_source_path is None:
            raise BadValueError("logSourcePath", "project has no log data yet")
        stat = os.stat(project.log_source_path)
        key = (stat.st_mtime_ns, stat.st_size)
        cached = self.datasets.get(project.project_id)
        if cached is not None and cached[0] == key:
            return cached[1]
        with open(project.log_source_path, "rb") as f:
            dataset, _ = ingest_log_file(f)
        self.datasets[project.project_id] = (key, dataset)
        return dataset

    def stale_source(self, project: Project) -> bool:
        """True when the source file no longer matches the pinned digest."""
        if project.log_source_path is None or project.source_digest is None:
            return False
        try:
            dataset = self.dataset(project)
        except (OSError, EmptyInputError):
            return True
        return dataset.source_digest != project.source_digest


def _record_or_404(dataset: LogDataset, record_id: int) -> LogRecord:
    if not 0 <= record_id < len(dataset):
        raise UnknownRecordError(record_id)
    return dataset[record_id]


def _video_or_404(project: Project, video_id: str):
    video = project.video(video_id)
    if video is None:
        raise UnknownVideoError(video_id)
    return video


def _marker_label(record: LogRecord) -> str:
    p = record.payload
    if isinstance(p, NotificationPayload):
        return f"{'posted' if p.is_posted else 'removed'} {p.name}"
    if isinstance(p, AppUsagePayload):
        return f"{p.kind.value} {p.name}"
    if isinstance(p, KeyLogPayload):
        return f"key {p.current_key!r} {p.name}"
    return record.datum_type


def _canonical(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload), media_type="application/json", status_code=status_code
    )


def _parse_range(range_header: Optional[str], size: int) -> Optional[tuple[int, int]]:
    """First byte range of a Range header, clamped; None for full body."""
    if not range_header or not range_header.startswith("bytes="):
        return None
    spec = range_header[6:].split(",")[0].strip()
    start_s, _, end_s = spec.partition("-")
    try:
        if start_s:
            start = int(start_s)
            end = int(end_s) if end_s else size - 1
        else:
            # suffix range: last N bytes
            start = max(0, size - int(end_s))
            end = size - 1
    except ValueError:
        return None
    end = min(end, size - 1)
    if start > end or start < 0:
        return None
    return (start, end)


def _range_from(range_ms_from: Optional[int], range_ms_to: Optional[int]):
    if range_ms_from is None and range_ms_to is None:
        return None
    lo = range_ms_from if range_ms_from is not None else 0
    hi = range_ms_to if range_ms_to is not None else (1 << 62)
    return (lo, hi)


def create_app(data_dir, base_path: str = "", ui_dir=None) -> FastAPI:
    """Service factory. All routes live under base_path; when ui_dir is
    given the built browser UI is served at /ui."""
    rt = _Runtime(Path(data_dir))
    app = FastAPI(title="log/video workbench", version="0.1.0")
    app.state.runtime = rt
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["ETag"],
    )
    router = APIRouter(prefix=base_path.rstrip("/"))

    @app.exception_handler(WorkbenchError)
    async def _domain_error(_request, exc: WorkbenchError):
        status = 400
        for cls, code in _STATUS_BY_ERROR.items():
            if isinstance(exc, cls):
                status = code
                break
        return JSONResponse(status_code=status, content=_error_body(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "BadParams", "message": str(exc.errors()[:3])},
        )

    @router.get("/health")
    def health():
        return _canonical({"ok": True})

    # --- projects -----------------------------------------------------

    @router.post("/projects", status_code=201)
    async def create_project(request: Request):
        body = await request.json()
        if not isinstance(body, dict) or not body.get("name"):
            raise BadValueError("name", "project needs a non-empty name")
        import uuid

        project = Project(project_id=uuid.uuid4().hex[:12], name=str(body["name"]))
        revision = rt.store.save(project)
        return _canonical(
            {"project": project_to_wire(project), "revision": revision}, status_code=201
        )

    @router.get("/projects")
    def list_projects():
        return _canonical({"projects": rt.store.list_projects()})

    @router.get("/projects/{pid}")
    def get_project(pid: str):
        project, revision = rt.project(pid)
        return _canonical(
            {
                "project": project_to_wire(project),
                "revision": revision,
                "staleSource": rt.stale_source(project),
            }
        )

    @router.put("/projects/{pid}")
    async def put_project(pid: str, request: Request, if_match: Optional[str] = Header(None)):
        if if_match is None:
            raise BadValueError("If-Match", "revision token header required")
        rt.project(pid)  # 404 for unknown ids
        body = await request.json()
        if not isinstance(body, dict):
            raise BadValueError("project", "body must be a JSON object")
        body["projectId"] = pid
        try:
            project = project_from_wire(body)
        except (KeyError, TypeError, ValueError) as e:
            raise BadValueError("project", f"malformed project document: {e}") from None
        revision = rt.store.save(project, expected_revision=if_match)
        return _canonical({"project": project_to_wire(project), "revision": revision})

    # --- ingestion ----------------------------------------------------

    @router.post("/projects/{pid}/logs")
    async def upload_logs(pid: str, request: Request):
        project, _ = rt.project(pid)
        data = await request.body()
        dataset, report = ingest_log_file(data)
        path = rt.logs_dir / f"{pid}.jsonl"
        path.write_bytes(data)
        project.log_source_path = str(path)
        project.source_digest = dataset.source_digest
        revision = rt.store.save(project)
        stat = os.stat(path)
        rt.datasets[pid] = ((stat.st_mtime_ns, stat.st_size), dataset)
        return _canonical(
            {"report": ingest_report_to_wire(report), "revision": revision}
        )

    @router.post("/projects/{pid}/videos")
    async def set_videos(pid: str, request: Request):
        project, _ = rt.project(pid)
        videos = parse_video_manifest(await request.body())
        project.videos = videos
        if project.active_video_id not in {v.video_id for v in videos}:
            project.active_video_id = videos[0].video_id if videos else None
        revision = rt.store.save(project)
        return _canonical(
            {"videos": [video_to_wire(v) for v in videos], "revision": revision}
        )

    # --- grid ----------------------------------------------------------

    def _resolve_spec(project: Project, dataset: LogDataset, raw: Optional[str]) -> FilterSpec:
        if raw:
            return FilterSpec.from_json(raw)
        if project.filter_spec is not None:
            return project.filter_spec
        return FilterSpec(frozenset(dataset.datum_types_present()))

    @router.get("/projects/{pid}/rows")
    def rows(
        pid: str,
        offset: int = Query(0, ge=0),
        limit: int = Query(100, ge=1, le=10_000),
        filter: Optional[str] = Query(None),
    ):
        project, _ = rt.project(pid)
        dataset = rt.dataset(project)
        spec = _resolve_spec(project, dataset, filter)
        view = apply_filter(dataset, spec)
        page = view.row_ids[offset : offset + limit]
        return _canonical(
            {
                "total": len(view),
                "offset": offset,
                "limit": limit,
                "datasetDigest": view.dataset_digest,
                "rows": [row_to_wire(dataset, dataset[i], spec) for i in page],
            }
        )

    @router.get("/projects/{pid}/rows/locate")
    def locate_row(pid: str, recordId: int, filter: Optional[str] = Query(None)):
        """Position of the nearest at-or-before record within the
        filtered view; lets the grid place a highlight that the active
        filter may have hidden."""
        project, _ = rt.project(pid)
        dataset = rt.dataset(project)
        _record_or_404(dataset, recordId)
        spec = _resolve_spec(project, dataset, filter)
        view = apply_filter(dataset, spec)
        j = _kernels.predecessor_in(dataset.timestamps, view.row_ids, dataset.timestamps[recordId])
        # timestamps tie-break can land after recordId; walk back to it
        while j >= 0 and view.row_ids[j] > recordId:
            j -= 1
        if j < 0:
            return _canonical({"position": None, "recordId": None, "exact": False})
        rid = view.row_ids[j]
        return _canonical({"position": j, "recordId": rid, "exact": rid == recordId})

    @router.get("/projects/{pid}/schema")
    def schema(pid: str):
        project, _ = rt.project(pid)
        dataset = rt.dataset(project)
        return _canonical(
            {
                dt: [{"name": c.name, "kind": c.kind} for c in dataset.schema_for(dt)]
                for dt in dataset.datum_types_present()
            }
        )

    @router.get("/projects/{pid}/distinct")
    def distinct(pid: str, column: str, datumTypes: Optional[str] = Query(None)):
        project, _ = rt.project(pid)
        dataset = rt.dataset(project)
        within = (
            set(datumTypes.split(",")) if datumTypes else set(dataset.datum_types_present())
        )
        return _canonical(
            {"column": column, "values": distinct_values(dataset, column, within)}
        )

    # --- sync -----------------------------------------------------------

    @router.post("/projects/{pid}/videos/{vid}/calibrate")
    async def calibrate_video(pid: str, vid: str, request: Request):
        project, _ = rt.project(pid)
        video = _video_or_404(project, vid)
        dataset = rt.dataset(project)
        body = await request.json()
        try:
            anchor = sync.SyncAnchor(int(body["recordId"]), int(body["videoTimeMs"]))
        except (KeyError, TypeError, ValueError):
            raise BadValueError("anchor", "body needs recordId and videoTimeMs") from None
        updated = sync.calibrate(video, dataset, anchor)
        project.videos = [updated if v.video_id == vid else v for v in project.videos]
        revision = rt.store.save(project)
        return _canonical({"video": video_to_wire(updated), "revision": revision})

    @router.get("/projects/{pid}/videos/{vid}/record-at")
    def record_at(pid: str, vid: str, t: int):
        project, _ = rt.project(pid)
        video = _video_or_404(project, vid)
        dataset = rt.dataset(project)
        rid = sync.record_at_video_time(dataset, video, t)
        return _canonical(
            {
                "recordId": rid,
                "timestampMs": None if rid is None else dataset[rid].timestamp_ms,
            }
        )

    @router.get("/projects/{pid}/videos/{vid}/video-time")
    def video_time(pid: str, vid: str, recordId: int):
        project, _ = rt.project(pid)
        video = _video_or_404(project, vid)
        dataset = rt.dataset(project)
        record = _record_or_404(dataset, recordId)
        mapped = sync.log_time_to_video_time(video, record.timestamp_ms)
        return _canonical({"videoTimeMs": mapped.ms, "inRange": mapped.in_range})

    @router.get("/projects/{pid}/videos/{vid}/markers")
    def markers(pid: str, vid: str, datumTypes: Optional[str] = Query(None)):
        project, _ = rt.project(pid)
        video = _video_or_404(project, vid)
        dataset = rt.dataset(project)
        wanted = set(datumTypes.split(",")) if datumTypes else None
        span = sync.video_span_records(dataset, video)
        out = []
        if span is not None:
            for rid in range(span[0], span[1] + 1):
                rec = dataset[rid]
                if wanted is not None and rec.datum_type not in wanted:
                    continue
                mapped = sync.log_time_to_video_time(video, rec.timestamp_ms)
                out.append(
                    {
                        "recordId": rid,
                        "videoTimeMs": mapped.ms,
                        "datumType": rec.datum_type,
                        "label": _marker_label(rec),
                    }
                )
        return _canonical({"markers": out})

    # --- analysis ---------------------------------------------------------

    @router.get("/projects/{pid}/analysis/typing-interval")
    def a_typing(
        pid: str,
        packageName: str,
        keyA: str,
        keyB: str,
        occurrence: int = Query(1, ge=1),
        fromMs: Optional[int] = Query(None),
        toMs: Optional[int] = Query(None),
    ):
        project, _ = rt.project(pid)
        dataset = rt.dataset(project)
        result = analysis.typing_interval(
            dataset, packageName, keyA, keyB, occurrence, _range_from(fromMs, toMs)
        )
        return _canonical(key_interval_to_wire(result))

    @router.get("/projects/{pid}/analysis/transitions")
    def a_transitions(
        pid: str,
        packageA: str,
        packageB: str,
        fromMs: Optional[int] = Query(None),
        toMs: Optional[int] = Query(None),
    ):
        project, _ = rt.project(pid)
        dataset = rt.dataset(project)
        if packageA == packageB:
            raise BadValueError("packageB", "packages must differ")
        count = analysis.app_transition_count(
            dataset, packageA, packageB, _range_from(fromMs, toMs)
        )
        return _canonical(transition_count_to_wire(count))

    @router.get("/projects/{pid}/analysis/notifications")
    def a_notifications(
        pid: str,
        packageName: str,
        fromMs: Optional[int] = Query(None),
        toMs: Optional[int] = Query(None),
    ):
        project, _ = rt.project(pid)
        dataset = rt.dataset(project)
        events = analysis.notification_events(dataset, packageName, _range_from(fromMs, toMs))
        return _canonical(notification_events_to_wire(events))

    @router.get("/projects/{pid}/analysis/sessions")
    def a_sessions(
        pid: str,
        packageName: str,
        fromMs: Optional[int] = Query(None),
        toMs: Optional[int] = Query(None),
    ):
        project, _ = rt.project(pid)
        dataset = rt.dataset(project)
        report = analysis.app_sessions(dataset, packageName, _range_from(fromMs, toMs))
        return _canonical(session_report_to_wire(report))

    # --- export -------------------------------------------------------------

    @router.get("/projects/{pid}/export/task-sheet")
    def export_sheet(pid: str):
        project, _ = rt.project(pid)
        return Response(
            content=export_task_sheet(project),
            media_type="text/csv",
            headers={"Content-Disposition": f'attachment; filename="{pid}-tasks.csv"'},
        )

    # --- cursor channel --------------------------------------------------

    @router.post("/projects/{pid}/cursor")
    async def post_cursor(pid: str, request: Request):
        project, _ = rt.project(pid)
        body = await request.json()
        origin = body.get("origin")
        if origin not in ("video", "log"):
            raise BadValueError("origin", "must be 'video' or 'log'")
        playing = bool(body.get("playing", False))
        video_id = body.get("videoId", project.active_video_id)
        state = {
            "projectId": pid,
            "origin": origin,
            "videoId": video_id,
            "videoTimeMs": body.get("videoTimeMs"),
            "highlightedRecordId": None,
            "playing": playing,
        }
        if origin == "video":
            if not isinstance(body.get("videoTimeMs"), int):
                raise BadValueError("videoTimeMs", "required for video cursors")
            if project.linked:
                video = _video_or_404(project, video_id)
                dataset = rt.dataset(project)
                state["highlightedRecordId"] = sync.record_at_video_time(
                    dataset, video, body["videoTimeMs"]
                )
        else:
            if not isinstance(body.get("recordId"), int):
                raise BadValueError("recordId", "required for log cursors")
            state["highlightedRecordId"] = body["recordId"]
            if project.linked:
                video = _video_or_404(project, video_id)
                dataset = rt.dataset(project)
                record = _record_or_404(dataset, body["recordId"])
                mapped = sync.log_time_to_video_time(video, record.timestamp_ms)
                state["videoTimeMs"] = mapped.ms
                state["inRange"] = mapped.in_range
        rt.channel(pid).publish(state)
        return _canonical(state)

    @router.get("/projects/{pid}/events")
    async def events(pid: str, limit: Optional[int] = Query(None, ge=1)):
        rt.project(pid)  # 404 for unknown ids

        channel = rt.channel(pid)

        async def gen():
            sent = 0
            async for msg in channel.stream():
                yield b"data: " + canonical_json(msg) + b"\n\n"
                sent += 1
                if limit is not None and sent >= limit:
                    break

        return StreamingResponse(gen(), media_type="text/event-stream")

    # --- media ----------------------------------------------------------

    @router.get("/projects/{pid}/media/{vid}")
    def media(pid: str, vid: str, request: Request):
        project, _ = rt.project(pid)
        video = _video_or_404(project, vid)
        uri = video.uri
        if uri.startswith("file://"):
            path = Path(uri[7:])
        elif "://" in uri:
            return JSONResponse(
                status_code=404,
                content={"error": "NoMedia", "message": "video has no local media file"},
            )
        else:
            path = Path(uri)
            if not path.is_absolute():
                path = rt.data_dir / "media" / path
        if not path.is_file():
            return JSONResponse(
                status_code=404,
                content={"error": "NoMedia", "message": f"no media at {path}"},
            )
        size = path.stat().st_size
        ctype = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        rng = _parse_range(request.headers.get("range"), size)
        with open(path, "rb") as f:
            if rng is None:
                data = f.read()
                return Response(
                    content=data,
                    media_type=ctype,
                    headers={"Accept-Ranges": "bytes", "Content-Length": str(size)},
                )
            start, end = rng
            f.seek(start)
            data = f.read(end - start + 1)
        return Response(
            content=data,
            status_code=206,
            media_type=ctype,
            headers={
                "Accept-Ranges": "bytes",
                "Content-Range": f"bytes {start}-{end}/{size}",
                "Content-Length": str(len(data)),
            },
        )

    app.include_router(router)
    return app
