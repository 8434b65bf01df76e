"""Single-file JSON persistence for analysis projects.

One project is one JSON document under the projects directory: dataset
reference (path + digest, never the log bytes themselves), video
descriptors with their calibration offsets, link state, the saved
filter spec, and the embedded task sheet. Revision tokens are content
hashes; writers pass the token they loaded and lose with
ConflictingRevisionError if someone else wrote in between. Writes go
through a temp file and an atomic rename, so readers only ever see a
complete old or new document.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import BadValueError, ConflictingRevisionError, UnknownProjectError
from .filtering import FilterSpec
from .model import VideoMeta
from .serialize import video_to_wire


def _now_ms() -> int:
    return int(time.time() * 1000)


@dataclass
class TaskItem:
    task_id: str
    prompt: str
    answer: str = ""
    answered_at: Optional[int] = None


@dataclass
class TaskSheet:
    items: list[TaskItem] = field(default_factory=list)

    def __post_init__(self):
        ids = [t.task_id for t in self.items]
        if len(ids) != len(set(ids)):
            raise ValueError("task ids must be unique")


@dataclass
class Project:
    project_id: str
    name: str
    log_source_path: Optional[str] = None
    source_digest: Optional[str] = None
    videos: list[VideoMeta] = field(default_factory=list)
    active_video_id: Optional[str] = None
    linked: bool = True
    filter_spec: Optional[FilterSpec] = None
    task_sheet: TaskSheet = field(default_factory=TaskSheet)
    created_at: int = 0
    updated_at: int = 0

    def validate(self) -> None:
        ids = [v.video_id for v in self.videos]
        if len(ids) != len(set(ids)):
            raise BadValueError("videos", "duplicate videoId")
        if self.active_video_id is not None and self.active_video_id not in ids:
            raise BadValueError("activeVideoId", f"unknown video {self.active_video_id!r}")

    def video(self, video_id: str) -> Optional[VideoMeta]:
        for v in self.videos:
            if v.video_id == video_id:
                return v
        return None


def project_to_wire(p: Project) -> dict:
    return {
        "projectId": p.project_id,
        "name": p.name,
        "logSourcePath": p.log_source_path,
        "sourceDigest": p.source_digest,
        "videos": [video_to_wire(v) for v in p.videos],
        "activeVideoId": p.active_video_id,
        "linked": p.linked,
        "filterSpec": p.filter_spec.to_json_obj() if p.filter_spec else None,
        "taskSheet": [
            {
                "taskId": t.task_id,
                "prompt": t.prompt,
                "answer": t.answer,
                "answeredAt": t.answered_at,
            }
            for t in p.task_sheet.items
        ],
        "createdAt": p.created_at,
        "updatedAt": p.updated_at,
    }


def project_from_wire(obj: dict) -> Project:
    videos = [
        VideoMeta(
            video_id=v["videoId"],
            uri=v["uri"],
            title=v["title"],
            start_epoch_ms=v["startEpochMs"],
            duration_ms=v["durationMs"],
            sync_offset_ms=v.get("syncOffsetMs", 0),
        )
        for v in obj.get("videos", ())
    ]
    sheet = TaskSheet(
        [
            TaskItem(t["taskId"], t["prompt"], t.get("answer", ""), t.get("answeredAt"))
            for t in obj.get("taskSheet", ())
        ]
    )
    raw_spec = obj.get("filterSpec")
    return Project(
        project_id=obj["projectId"],
        name=obj["name"],
        log_source_path=obj.get("logSourcePath"),
        source_digest=obj.get("sourceDigest"),
        videos=videos,
        active_video_id=obj.get("activeVideoId"),
        linked=bool(obj.get("linked", True)),
        filter_spec=FilterSpec.from_json_obj(raw_spec) if raw_spec else None,
        task_sheet=sheet,
        created_at=obj.get("createdAt", 0),
        updated_at=obj.get("updatedAt", 0),
    )


def _revision_of(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


class ProjectStore:
    """Projects directory with optimistic, atomic writes."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, project_id: str) -> Path:
        if not project_id or "/" in project_id or project_id.startswith("."):
            raise BadValueError("projectId", f"unsafe id {project_id!r}")
        return self.root / f"{project_id}.json"

    def _current_revision(self, path: Path) -> Optional[str]:
        try:
            return _revision_of(path.read_bytes())
        except FileNotFoundError:
            return None

    def save(self, project: Project, expected_revision: Optional[str] = None) -> str:
        """Persist; returns the new revision token.

        expected_revision=None writes unconditionally (create or
        last-write-wins); otherwise the write only lands if the stored
        revision still matches.
        """
        project.validate()
        path = self._path(project.project_id)
        if not project.created_at:
            project.created_at = _now_ms()
        project.updated_at = _now_ms()
        data = json.dumps(project_to_wire(project), indent=2, sort_keys=True).encode()

        with self._lock:
            if expected_revision is not None:
                current = self._current_revision(path)
                if current != expected_revision:
                    raise ConflictingRevisionError(expected_revision, current or "<missing>")
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
            try:
                with os.fdopen(fd, "wb") as f:
                    f.write(data)
                    f.flush()
                    os.fsync(f.fileno())
                os.replace(tmp, path)
            except BaseException:
                try:
                    os.unlink(tmp)
                except OSError:
                    pass
                raise
        return _revision_of(data)

    def load(self, project_id: str) -> tuple[Project, str]:
        path = self._path(project_id)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise UnknownProjectError(project_id) from None
        try:
            project = project_from_wire(json.loads(data))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise BadValueError("project", f"corrupted project document: {e}") from None
        return project, _revision_of(data)

    def list_projects(self) -> list[dict]:
        out = []
        for path in sorted(self.root.glob("*.json")):
            try:
                obj = json.loads(path.read_bytes())
            except (OSError, json.JSONDecodeError):
                continue
            out.append(
                {
                    "projectId": obj.get("projectId", path.stem),
                    "name": obj.get("name", ""),
                    "updatedAt": obj.get("updatedAt", 0),
                }
            )
        return out


def export_task_sheet(project: Project) -> bytes:
    """Task sheet as RFC-4180 CSV (CRLF lines, quoted as needed)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["taskId", "prompt", "answer", "answeredAt"])
    for t in project.task_sheet.items:
        writer.writerow(
            [t.task_id, t.prompt, t.answer, "" if t.answered_at is None else t.answered_at]
        )
    return buf.getvalue().encode()
