"""Canonical JSON wire forms for domain objects.

The HTTP endpoints and the CLI both emit these exact shapes; tests
assert the service responses are byte-identical to serializing the
corresponding core result, which only works with one canonical encoder
(sorted keys, compact separators, UTF-8).
"""

from __future__ import annotations

import json
from typing import Iterable

from .analysis import KeyInterval, NotificationEvent, SessionReport
from .filtering import FilterSpec
from .ingest import IngestReport
from .model import (
    AppUsagePayload,
    KeyLogPayload,
    LogDataset,
    LogRecord,
    NotificationPayload,
    VideoMeta,
    render_row,
)


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode()


def record_to_wire(record: LogRecord) -> dict:
    """The JSONL line form of a record (no record id; ids are positional)."""
    out: dict = {"timestamp": record.timestamp_ms, "datumType": record.datum_type}
    p = record.payload
    if isinstance(p, AppUsagePayload):
        out.update(type=p.kind.value, name=p.name, packageName=p.package_name)
    elif isinstance(p, KeyLogPayload):
        out.update(
            currentKey=p.current_key,
            timeTaken=p.time_taken_ms,
            name=p.name,
            packageName=p.package_name,
        )
    elif isinstance(p, NotificationPayload):
        out.update(isPosted=p.is_posted, name=p.name, packageName=p.package_name)
    else:
        out.update(p)
    out.update(record.extras)
    return out


def row_to_wire(dataset: LogDataset, record: LogRecord, spec: FilterSpec | None = None) -> dict:
    """Grid row: id, metadata, and the record's schema cells.

    When a filter spec restricts visible columns for this datum type,
    only those cells render (stage 1 is presentation only).
    """
    cells = render_row(record, dataset.observed_extras(record.datum_type))
    if spec is not None:
        visible = spec.visible_columns.get(record.datum_type)
        if visible is not None:
            cells = {k: v for k, v in cells.items() if k in visible}
    return {
        "recordId": record.record_id,
        "timestampMs": record.timestamp_ms,
        "datumType": record.datum_type,
        "cells": cells,
    }


def video_to_wire(v: VideoMeta) -> dict:
    return {
        "videoId": v.video_id,
        "uri": v.uri,
        "title": v.title,
        "startEpochMs": v.start_epoch_ms,
        "durationMs": v.duration_ms,
        "syncOffsetMs": v.sync_offset_ms,
    }


def ingest_report_to_wire(report: IngestReport) -> dict:
    return {
        "recordsAccepted": report.records_accepted,
        "recordsRejected": report.records_rejected,
        "rejections": [
            {"lineNumber": n, "reason": reason} for n, reason in report.rejections
        ],
        "timeSpan": (
            None
            if report.time_span is None
            else {"minTimestampMs": report.time_span[0], "maxTimestampMs": report.time_span[1]}
        ),
    }


def key_interval_to_wire(ki: KeyInterval) -> dict:
    return {
        "firstRecordId": ki.first_record_id,
        "secondRecordId": ki.second_record_id,
        "firstKey": ki.first_key,
        "secondKey": ki.second_key,
        "intervalMs": ki.interval_ms,
    }


def transition_count_to_wire(count: int) -> dict:
    return {"count": count}


def notification_events_to_wire(events: Iterable[NotificationEvent]) -> list[dict]:
    return [
        {
            "recordId": e.record_id,
            "timestampMs": e.timestamp_ms,
            "packageName": e.package_name,
            "isPosted": e.is_posted,
        }
        for e in events
    ]


def session_report_to_wire(report: SessionReport) -> dict:
    return {
        "sessions": [
            {
                "packageName": s.package_name,
                "startRecordId": s.start_record_id,
                "endRecordId": s.end_record_id,
                "startMs": s.start_ms,
                "endMs": s.end_ms,
            }
            for s in report.sessions
        ],
        "orphans": [
            {"recordId": o.record_id, "timestampMs": o.timestamp_ms, "kind": o.kind.value}
            for o in report.orphans
        ],
    }
