"""Log-file and video-manifest parsing.

Input logs are UTF-8 JSON Lines. Each line must carry `timestamp`
(integer epoch ms) and `datumType`; payload field names are matched
case-insensitively against the canonical camelCase names. Malformed
lines are skipped and reported, not fatal: in-the-wild logger output
contains noise and the tool exists to explore it.

Ingestion has a fast path tuned for well-formed lines (the common case
by far; a six-minute session is thousands of lines but in-the-wild logs
run to millions) and falls back to a permissive per-line parser for
anything unusual. Both paths produce identical records.
"""

from __future__ import annotations

import gc
import hashlib
import json
import sys
from array import array
from dataclasses import dataclass
from typing import BinaryIO, Union

from . import model
from .errors import (
    BadValueError,
    EmptyInputError,
    MalformedJsonError,
    MissingFieldError,
    WorkbenchError,
)
from .model import (
    APP_USAGE_EVENT,
    EMPTY_EXTRAS,
    KEY_LOG,
    NOTIFICATION,
    AppUsageEventKind,
    AppUsagePayload,
    KeyLogPayload,
    LogDataset,
    LogRecord,
    NotificationPayload,
    VideoMeta,
)

try:
    import msgspec

    _decode_line = msgspec.json.Decoder().decode
    _DecodeError: type = msgspec.DecodeError
except ImportError:  # pragma: no cover - msgspec is a declared dependency
    _decode_line = json.loads
    _DecodeError = json.JSONDecodeError


@dataclass
class IngestReport:
    """Outcome of one ingestion run.

    records_accepted + records_rejected equals the number of non-blank
    input lines; rejections carry (line_number, reason) pairs.
    time_span is None only when nothing was accepted.
    """

    records_accepted: int
    records_rejected: int
    rejections: list[tuple[int, str]]
    time_span: tuple[int, int] | None


class _Bail(Exception):
    """Internal: fast-path line needs the permissive parser."""


_intern = sys.intern

_META_FIELDS = ("timestamp", "datumType")
_KEY_LOG_FIELDS = ("currentKey", "timeTaken", "name", "packageName")
_APP_USAGE_FIELDS = ("type", "name", "packageName")
_NOTIFICATION_FIELDS = ("isPosted", "name", "packageName")
_KEY_LOG_ALL = _META_FIELDS + _KEY_LOG_FIELDS
_APP_USAGE_ALL = _META_FIELDS + _APP_USAGE_FIELDS
_NOTIFICATION_ALL = _META_FIELDS + _NOTIFICATION_FIELDS
_KIND_BY_WIRE = {k.value: k for k in AppUsageEventKind}


def _extras_after(obj: dict, consumed: tuple) -> dict:
    return {k: v for k, v in obj.items() if k not in consumed}


def _field(obj: dict, name: str, line_number: int):
    """Case-insensitive field lookup; consumes nothing."""
    if name in obj:
        return obj[name]
    lower = name.lower()
    for k, v in obj.items():
        if k.lower() == lower:
            return v
    raise MissingFieldError(name, line_number)


def _consumed_keys(obj: dict, names: tuple) -> set:
    lowers = {n.lower() for n in names}
    return {k for k in obj if k.lower() in lowers}


def _require_str(value, field: str, line_number: int) -> str:
    if type(value) is not str:
        raise BadValueError(field, f"expected string, got {value!r}", line_number)
    return value


def _parse_obj(obj, line_number: int) -> LogRecord:
    """Permissive single-record parser; the reference semantics."""
    if type(obj) is not dict:
        raise MalformedJsonError(line_number, "top-level value is not an object")
    if "timestamp" not in obj:
        raise MissingFieldError("timestamp", line_number)
    ts = obj["timestamp"]
    if type(ts) is not int:
        raise BadValueError("timestamp", f"expected integer ms, got {ts!r}", line_number)
    if ts <= 0:
        raise BadValueError("timestamp", f"must be positive, got {ts}", line_number)
    if "datumType" not in obj:
        raise MissingFieldError("datumType", line_number)
    tag = _require_str(obj["datumType"], "datumType", line_number)
    tag = model.canonical_datum_type(tag)

    meta = ("timestamp", "datumType")
    if tag == KEY_LOG:
        ck = _require_str(_field(obj, "currentKey", line_number), "currentKey", line_number)
        tt = _field(obj, "timeTaken", line_number)
        if type(tt) is not int:
            raise BadValueError("timeTaken", f"expected integer ms, got {tt!r}", line_number)
        if tt < 0:
            raise BadValueError("timeTaken", f"must be >= 0, got {tt}", line_number)
        nm = _require_str(_field(obj, "name", line_number), "name", line_number)
        pk = _require_str(_field(obj, "packageName", line_number), "packageName", line_number)
        if not pk:
            raise BadValueError("packageName", "must be non-empty", line_number)
        payload = KeyLogPayload(ck, tt, _intern(nm), _intern(pk))
        consumed = _consumed_keys(obj, meta + _KEY_LOG_FIELDS)
    elif tag == APP_USAGE_EVENT:
        raw_kind = _require_str(_field(obj, "type", line_number), "type", line_number)
        try:
            kind = AppUsageEventKind.parse(raw_kind)
        except ValueError:
            raise BadValueError("type", f"unknown app usage event kind {raw_kind!r}", line_number) from None
        nm = _require_str(_field(obj, "name", line_number), "name", line_number)
        pk = _require_str(_field(obj, "packageName", line_number), "packageName", line_number)
        if not pk:
            raise BadValueError("packageName", "must be non-empty", line_number)
        payload = AppUsagePayload(kind, _intern(nm), _intern(pk))
        consumed = _consumed_keys(obj, meta + _APP_USAGE_FIELDS)
    elif tag == NOTIFICATION:
        posted = _field(obj, "isPosted", line_number)
        if type(posted) is not bool:
            raise BadValueError("isPosted", f"expected boolean, got {posted!r}", line_number)
        nm = _require_str(_field(obj, "name", line_number), "name", line_number)
        pk = _require_str(_field(obj, "packageName", line_number), "packageName", line_number)
        if not pk:
            raise BadValueError("packageName", "must be non-empty", line_number)
        payload = NotificationPayload(posted, _intern(nm), _intern(pk))
        consumed = _consumed_keys(obj, meta + _NOTIFICATION_FIELDS)
    else:
        # opaque datum type: the whole non-metadata payload flows through
        payload = {k: v for k, v in obj.items() if k not in meta}
        return LogRecord(-1, ts, tag, payload, EMPTY_EXTRAS)

    extras = {k: v for k, v in obj.items() if k not in consumed}
    return LogRecord(-1, ts, tag, payload, extras if extras else EMPTY_EXTRAS)


def parse_log_line(line: Union[str, bytes], line_number: int) -> LogRecord:
    """Parse one JSONL line into a record with record_id = -1.

    Raises MalformedJsonError / MissingFieldError / BadValueError; the
    line number is carried on the exception for reporting.
    """
    try:
        obj = _decode_line(line)
    except (_DecodeError, ValueError) as e:
        raise MalformedJsonError(line_number, str(e)) from None
    return _parse_obj(obj, line_number)


def ingest_log_file(source: Union[bytes, BinaryIO]) -> tuple[LogDataset, IngestReport]:
    """Parse a JSONL byte stream into a sorted, indexed dataset.

    Two phases: decode every line and gate on the metadata, then sweep
    the (timestamp, line, object) triples in sorted order, building the
    records and the columnar index in a single fused pass. The inlined
    per-type blocks mirror the permissive parser exactly (anything
    unusual falls back to it) and the fused index is property-tested
    against the one LogDataset builds itself.

    Deterministic for identical input bytes. Raises EmptyInputError
    when no line yields a record; I/O errors propagate as OSError.
    """
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
    else:
        data = source.read()
    digest = hashlib.sha256(data).hexdigest()

    # The build allocates millions of acyclic objects; generational GC
    # passes over the growing heap dominate large ingests, so pause
    # collection for the duration.
    gc_was_enabled = gc.isenabled()
    if gc_was_enabled:
        gc.disable()
    try:
        return _ingest_parsed(data, digest)
    finally:
        if gc_was_enabled:
            gc.enable()


def _ingest_parsed(data: bytes, digest: str) -> tuple[LogDataset, IngestReport]:
    decode = _decode_line
    rejections: list[tuple[int, str]] = []
    triples: list = []
    push = triples.append

    line_number = 0
    for raw in data.split(b"\n"):
        line_number += 1
        if not raw or raw.isspace():
            continue
        try:
            obj = decode(raw)
            ts = obj["timestamp"]
            if type(ts) is not int or ts <= 0 or type(obj["datumType"]) is not str:
                raise _Bail
            push((ts, line_number, obj))
        except Exception:
            try:
                rec = parse_log_line(raw, line_number)
            except WorkbenchError as err:
                rejections.append((line_number, str(err)))
            else:  # valid despite failing the cheap gate
                push((rec.timestamp_ms, line_number, rec))

    if not triples:
        err = EmptyInputError("no records accepted from input")
        err.report = IngestReport(0, len(rejections), rejections, None)
        raise err

    triples.sort()  # (timestamp, line number): ties keep input order

    intern = _intern
    kind_by_wire = _KIND_BY_WIRE
    canonical = model.canonical_datum_type
    records: list[LogRecord] = []
    rec_append = records.append
    ts_arr = array("q")
    ts_append = ts_arr.append
    columns = model.new_column_index()
    dt_col = columns[model.COL_DATUM_TYPE]
    type_col = columns[model.COL_TYPE]
    name_col = columns[model.COL_NAME]
    pkg_col = columns[model.COL_PACKAGE_NAME]
    key_col = columns[model.COL_CURRENT_KEY]
    posted_col = columns[model.COL_IS_POSTED]
    dt_codes, dt_code_of = dt_col.codes.append, dt_col.code_of
    type_codes, type_code_of = type_col.codes.append, type_col.code_of
    name_codes, name_code_of = name_col.codes.append, name_col.code_of
    pkg_codes, pkg_code_of = pkg_col.codes.append, pkg_col.code_of
    key_codes, key_code_of = key_col.codes.append, key_col.code_of
    posted_codes, posted_code_of = posted_col.codes.append, posted_col.code_of
    other_positions: list[int] = []
    other_extras: dict[str, set] = {}

    i = 0
    for ts, seq, obj in triples:
        if type(obj) is dict:
            tag = obj["datumType"]
            try:
                if tag == KEY_LOG:
                    ck = obj["currentKey"]
                    tt = obj["timeTaken"]
                    nm = obj["name"]
                    pk = obj["packageName"]
                    if (
                        type(ck) is not str
                        or type(tt) is not int
                        or tt < 0
                        or type(nm) is not str
                        or type(pk) is not str
                        or not pk
                    ):
                        raise _Bail
                    nm = intern(nm)
                    pk = intern(pk)
                    extras = EMPTY_EXTRAS if len(obj) == 6 else _extras_after(obj, _KEY_LOG_ALL)
                    rec_append(
                        LogRecord(i, ts, KEY_LOG, KeyLogPayload(ck, tt, nm, pk), extras)
                    )
                    ts_append(ts)
                    dt_codes(dt_code_of(KEY_LOG))
                    type_codes(-1)
                    name_codes(name_code_of(nm))
                    pkg_codes(pkg_code_of(pk))
                    key_codes(key_code_of(ck))
                    posted_codes(-1)
                    i += 1
                    continue
                if tag == APP_USAGE_EVENT:
                    kind = kind_by_wire[obj["type"]]
                    nm = obj["name"]
                    pk = obj["packageName"]
                    if type(nm) is not str or type(pk) is not str or not pk:
                        raise _Bail
                    nm = intern(nm)
                    pk = intern(pk)
                    extras = EMPTY_EXTRAS if len(obj) == 5 else _extras_after(obj, _APP_USAGE_ALL)
                    rec_append(
                        LogRecord(i, ts, APP_USAGE_EVENT, AppUsagePayload(kind, nm, pk), extras)
                    )
                    ts_append(ts)
                    dt_codes(dt_code_of(APP_USAGE_EVENT))
                    type_codes(type_code_of(kind.value))
                    name_codes(name_code_of(nm))
                    pkg_codes(pkg_code_of(pk))
                    key_codes(-1)
                    posted_codes(-1)
                    i += 1
                    continue
                if tag == NOTIFICATION:
                    posted = obj["isPosted"]
                    nm = obj["name"]
                    pk = obj["packageName"]
                    if (
                        type(posted) is not bool
                        or type(nm) is not str
                        or type(pk) is not str
                        or not pk
                    ):
                        raise _Bail
                    nm = intern(nm)
                    pk = intern(pk)
                    extras = (
                        EMPTY_EXTRAS if len(obj) == 5 else _extras_after(obj, _NOTIFICATION_ALL)
                    )
                    rec_append(
                        LogRecord(i, ts, NOTIFICATION, NotificationPayload(posted, nm, pk), extras)
                    )
                    ts_append(ts)
                    dt_codes(dt_code_of(NOTIFICATION))
                    type_codes(-1)
                    name_codes(name_code_of(nm))
                    pkg_codes(pkg_code_of(pk))
                    key_codes(-1)
                    posted_codes(posted_code_of("true" if posted else "false"))
                    i += 1
                    continue
                canon = canonical(tag)
                if canon != tag:  # a case variant of a named type
                    raise _Bail
                # opaque datum type: remaining fields are the payload
                del obj["timestamp"], obj["datumType"]
                rec_append(LogRecord(i, ts, tag, obj, EMPTY_EXTRAS))
                ts_append(ts)
                dt_codes(dt_code_of(tag))
                type_codes(-1)
                name_codes(-1)
                pkg_codes(-1)
                key_codes(-1)
                posted_codes(-1)
                other_positions.append(i)
                seen = other_extras.get(tag)
                if seen is None:
                    seen = other_extras[tag] = set()
                seen.update(obj.keys())
                i += 1
                continue
            except (_Bail, KeyError, TypeError):
                pass
            try:
                rec = _parse_obj(obj, seq)
            except WorkbenchError as err:
                rejections.append((seq, str(err)))
                continue
        else:
            rec = obj  # pre-parsed by the permissive path

        rec.record_id = i
        rec_append(rec)
        ts_append(rec.timestamp_ms)
        model.index_one_record(rec, i, columns, other_positions, other_extras)
        i += 1

    if not records:
        err = EmptyInputError("no records accepted from input")
        err.report = IngestReport(0, len(rejections), rejections, None)
        raise err

    model.finish_other_columns(records, columns, other_positions, other_extras)
    observed = {tag: tuple(sorted(keys)) for tag, keys in other_extras.items()}
    dataset = LogDataset(records, digest, _parts=(ts_arr, columns, observed))
    rejections.sort()
    report = IngestReport(
        records_accepted=len(records),
        records_rejected=len(rejections),
        rejections=rejections,
        time_span=dataset.time_span(),
    )
    return dataset, report


_MANIFEST_REQUIRED = ("videoId", "uri", "title", "startEpochMs", "durationMs")


def parse_video_manifest(source: Union[bytes, str, BinaryIO]) -> list[VideoMeta]:
    """Parse a JSON array of video descriptors, preserving order.

    The array order populates the UI's video dropdown. Unknown fields
    are ignored; duplicate videoIds are rejected.
    """
    if hasattr(source, "read"):
        source = source.read()
    try:
        entries = json.loads(source)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedJsonError(0, str(e)) from None
    if not isinstance(entries, list):
        raise MalformedJsonError(0, "manifest must be a JSON array")

    videos: list[VideoMeta] = []
    seen_ids = set()
    for pos, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise MalformedJsonError(pos, "manifest entry is not an object")
        for name in _MANIFEST_REQUIRED:
            if name not in entry:
                raise MissingFieldError(name, pos)
        vid = entry["videoId"]
        if type(vid) is not str or not vid:
            raise BadValueError("videoId", f"expected non-empty string, got {vid!r}", pos)
        if vid in seen_ids:
            raise BadValueError("videoId", f"duplicate videoId {vid!r}", pos)
        seen_ids.add(vid)
        duration = entry["durationMs"]
        if type(duration) is not int or duration <= 0:
            raise BadValueError("durationMs", f"must be a positive integer, got {duration!r}", pos)
        start = entry["startEpochMs"]
        if type(start) is not int:
            raise BadValueError("startEpochMs", f"expected integer ms, got {start!r}", pos)
        offset = entry.get("syncOffsetMs", 0)
        if type(offset) is not int:
            raise BadValueError("syncOffsetMs", f"expected integer ms, got {offset!r}", pos)
        videos.append(
            VideoMeta(
                video_id=vid,
                uri=_require_str(entry["uri"], "uri", pos),
                title=_require_str(entry["title"], "title", pos),
                start_epoch_ms=start,
                duration_ms=duration,
                sync_offset_ms=offset,
            )
        )
    return videos
