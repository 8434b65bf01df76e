"""Workbench core for exploring app-usage logs alongside screen recordings.

The pieces: ingest JSONL logger output into an immutable indexed
dataset, map times between the log's wall clock and each video's
playback clock (one-anchor calibration), filter rows, compute usage
metrics, persist projects, and serve it all over HTTP for the browser
UI. A deterministic scenario generator provides fixtures with planted
ground truth.
"""

from ._kernels import backend as kernel_backend
from .model import (
    APP_USAGE_EVENT,
    KEY_LOG,
    NOTIFICATION,
    AppUsageEventKind,
    AppUsagePayload,
    KeyLogPayload,
    LogDataset,
    LogRecord,
    NotificationPayload,
    VideoMeta,
    column_schema,
)
from .ingest import IngestReport, ingest_log_file, parse_log_line, parse_video_manifest
from .sync import (
    MappedVideoTime,
    SyncAnchor,
    calibrate,
    log_time_to_video_time,
    record_at_video_time,
    video_span_records,
    video_time_to_log_time,
)
from .filtering import FilterSpec, FilteredView, Predicate, apply_filter, distinct_values
from .analysis import (
    AppSession,
    KeyInterval,
    NotificationEvent,
    SessionReport,
    app_sessions,
    app_transition_count,
    notification_events,
    typing_interval,
)

__version__ = "0.1.0"

__all__ = [
    "APP_USAGE_EVENT",
    "KEY_LOG",
    "NOTIFICATION",
    "AppUsageEventKind",
    "AppUsagePayload",
    "AppSession",
    "FilterSpec",
    "FilteredView",
    "IngestReport",
    "KeyInterval",
    "KeyLogPayload",
    "LogDataset",
    "LogRecord",
    "MappedVideoTime",
    "NotificationEvent",
    "NotificationPayload",
    "Predicate",
    "SessionReport",
    "SyncAnchor",
    "VideoMeta",
    "app_sessions",
    "app_transition_count",
    "apply_filter",
    "calibrate",
    "column_schema",
    "distinct_values",
    "ingest_log_file",
    "kernel_backend",
    "log_time_to_video_time",
    "notification_events",
    "parse_log_line",
    "parse_video_manifest",
    "record_at_video_time",
    "typing_interval",
    "video_span_records",
    "video_time_to_log_time",
]
