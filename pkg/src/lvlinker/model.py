"""Domain types for app-usage log records, datasets, and videos.

A log stream is newline-delimited JSON where every record carries two
metadata fields (`timestamp` in epoch milliseconds, `datumType`) plus a
payload whose shape depends on the datum type. Three datum types get
typed payloads; everything else flows through as an opaque map so that
no logger output is lost.

Timestamps are integer epoch milliseconds (UTC assumed); the logger's
key-interval granularity is milliseconds, so nothing finer is modeled.
"""

from __future__ import annotations

import json
from array import array
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

# Canonical datum type tags. Any other incoming tag is kept verbatim and
# treated as an "other" type with metadata-plus-extras columns.
APP_USAGE_EVENT = "APP_USAGE_EVENT"
KEY_LOG = "KEY_LOG"
NOTIFICATION = "NOTIFICATION"
NAMED_DATUM_TYPES = (APP_USAGE_EVENT, KEY_LOG, NOTIFICATION)

_NAMED_BY_UPPER = {t.upper(): t for t in NAMED_DATUM_TYPES}


def canonical_datum_type(raw: str) -> str:
    """Map an incoming datumType string to its canonical form.

    The three named types match case-insensitively; any other tag is
    preserved verbatim.
    """
    return _NAMED_BY_UPPER.get(raw.upper(), raw)


def is_named_datum_type(tag: str) -> bool:
    return tag in _NAMED_BY_UPPER.values()


class AppUsageEventKind(Enum):
    """Foreground/background/termination state change of an app."""

    RESUMED = "Activity_resumed"
    PAUSED = "Activity_paused"
    STOPPED = "Activity_stopped"

    @classmethod
    def parse(cls, raw: str) -> "AppUsageEventKind":
        """Case-insensitive parse of the wire strings; raises ValueError."""
        try:
            return _KIND_BY_LOWER[raw.lower()]
        except (KeyError, AttributeError):
            raise ValueError(f"unknown app usage event kind: {raw!r}") from None


_KIND_BY_LOWER = {k.value.lower(): k for k in AppUsageEventKind}


@dataclass(slots=True)
class AppUsagePayload:
    kind: AppUsageEventKind
    name: str          # user-facing app name
    package_name: str  # developer package id, non-empty


@dataclass(slots=True)
class KeyLogPayload:
    current_key: str
    time_taken_ms: int  # elapsed since the previous key, >= 0
    name: str
    package_name: str


@dataclass(slots=True)
class NotificationPayload:
    is_posted: bool
    name: str
    package_name: str


Payload = Union[AppUsagePayload, KeyLogPayload, NotificationPayload, Mapping]

# Shared by records that carry no unrecognized fields; never mutated.
EMPTY_EXTRAS: Mapping = {}


@dataclass(slots=True)
class LogRecord:
    """One timestamped event.

    record_id is the record's 0-based position in its dataset; records
    produced by single-line parsing carry -1 until a dataset assigns
    the final ordinal. Instances are treated as immutable once a
    dataset holds them.
    """

    record_id: int
    timestamp_ms: int
    datum_type: str
    payload: Payload
    extras: Mapping = field(default_factory=lambda: EMPTY_EXTRAS)


@dataclass(frozen=True)
class VideoMeta:
    """A video's identity and wall-clock placement.

    start_epoch_ms is the estimated wall-clock time of frame 0;
    sync_offset_ms is the additive calibration correction on top.
    """

    video_id: str
    uri: str
    title: str
    start_epoch_ms: int
    duration_ms: int
    sync_offset_ms: int = 0

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise ValueError("duration_ms must be positive")

    @property
    def effective_start_ms(self) -> int:
        """Calibrated wall-clock time of frame 0."""
        return self.start_epoch_ms + self.sync_offset_ms


# --- column schemas -------------------------------------------------

class Column(NamedTuple):
    name: str
    kind: str  # "integer" | "string" | "boolean" | "enum"


COL_TIMESTAMP = "timestamp"
COL_DATUM_TYPE = "datumType"
COL_TYPE = "type"
COL_NAME = "name"
COL_PACKAGE_NAME = "packageName"
COL_CURRENT_KEY = "currentKey"
COL_TIME_TAKEN = "timeTaken"
COL_IS_POSTED = "isPosted"

_METADATA_COLUMNS = (
    Column(COL_TIMESTAMP, "integer"),
    Column(COL_DATUM_TYPE, "string"),
)

_NAMED_SCHEMAS: dict[str, tuple[Column, ...]] = {
    APP_USAGE_EVENT: _METADATA_COLUMNS + (
        Column(COL_TYPE, "enum"),
        Column(COL_NAME, "string"),
        Column(COL_PACKAGE_NAME, "string"),
    ),
    KEY_LOG: _METADATA_COLUMNS + (
        Column(COL_CURRENT_KEY, "string"),
        Column(COL_TIME_TAKEN, "integer"),
        Column(COL_NAME, "string"),
        Column(COL_PACKAGE_NAME, "string"),
    ),
    NOTIFICATION: _METADATA_COLUMNS + (
        Column(COL_IS_POSTED, "boolean"),
        Column(COL_NAME, "string"),
        Column(COL_PACKAGE_NAME, "string"),
    ),
}


def column_schema(datum_type: str, observed_extras: Iterable[str] = ()) -> tuple[Column, ...]:
    """Ordered column descriptors for one datum type.

    The three named types have fixed schemas; any other type renders
    its metadata plus the given observed payload keys, sorted.
    """
    schema = _NAMED_SCHEMAS.get(canonical_datum_type(datum_type))
    if schema is not None:
        return schema
    extra_cols = tuple(Column(k, "string") for k in sorted(observed_extras))
    return _METADATA_COLUMNS + extra_cols


def stringify_value(value) -> str:
    """Canonical display/match form of a cell value.

    None renders empty; booleans render as JSON true/false; everything
    non-string falls back to compact JSON.
    """
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def record_value(record: LogRecord, column: str) -> str | None:
    """Stringified value of one schema column for one record.

    Returns None when the column is not part of this record's schema
    (callers treat that as "predicate does not apply"). A column that
    is in the schema but has no value on this record renders as "".
    """
    if column == COL_TIMESTAMP:
        return str(record.timestamp_ms)
    if column == COL_DATUM_TYPE:
        return record.datum_type
    p = record.payload
    if isinstance(p, AppUsagePayload):
        if column == COL_TYPE:
            return p.kind.value
        if column == COL_NAME:
            return p.name
        if column == COL_PACKAGE_NAME:
            return p.package_name
        return None
    if isinstance(p, KeyLogPayload):
        if column == COL_CURRENT_KEY:
            return p.current_key
        if column == COL_TIME_TAKEN:
            return str(p.time_taken_ms)
        if column == COL_NAME:
            return p.name
        if column == COL_PACKAGE_NAME:
            return p.package_name
        return None
    if isinstance(p, NotificationPayload):
        if column == COL_IS_POSTED:
            return stringify_value(p.is_posted)
        if column == COL_NAME:
            return p.name
        if column == COL_PACKAGE_NAME:
            return p.package_name
        return None
    # opaque payload: every observed key is a schema column
    return stringify_value(p.get(column)) if column in p else None


def render_row(record: LogRecord, observed_extras: Iterable[str] = ()) -> dict[str, str]:
    """Project a record onto its schema columns; missing extras render empty."""
    row = {}
    for col in column_schema(record.datum_type, observed_extras):
        v = record_value(record, col.name)
        row[col.name] = "" if v is None else v
    return row


# --- dataset with columnar index -------------------------------------

# Columns kept as interned code arrays for fast filtering. All other
# columns are evaluated per row.
INDEXED_COLUMNS = (
    COL_DATUM_TYPE,
    COL_TYPE,
    COL_NAME,
    COL_PACKAGE_NAME,
    COL_CURRENT_KEY,
    COL_IS_POSTED,
)


class ColumnIndex:
    """Interned value codes for one column.

    codes[i] is -1 when the column is absent from record i's schema,
    otherwise an index into `values` (the canonical string form).
    """

    __slots__ = ("codes", "values", "by_value")

    def __init__(self):
        self.codes = array("i")
        self.values: list[str] = []
        self.by_value: dict[str, int] = {}

    def code_of(self, value: str) -> int:
        c = self.by_value.get(value)
        if c is None:
            c = len(self.values)
            self.by_value[value] = c
            self.values.append(value)
        return c


def new_column_index() -> dict[str, ColumnIndex]:
    return {name: ColumnIndex() for name in INDEXED_COLUMNS}


def index_one_record(rec: LogRecord, i: int, columns, other_positions, other_extras) -> None:
    """Append one record's codes to every indexed column."""
    type_col = columns[COL_TYPE]
    name_col = columns[COL_NAME]
    pkg_col = columns[COL_PACKAGE_NAME]
    key_col = columns[COL_CURRENT_KEY]
    posted_col = columns[COL_IS_POSTED]
    dt_col = columns[COL_DATUM_TYPE]
    dt_col.codes.append(dt_col.code_of(rec.datum_type))
    p = rec.payload
    if type(p) is KeyLogPayload:
        type_col.codes.append(-1)
        name_col.codes.append(name_col.code_of(p.name))
        pkg_col.codes.append(pkg_col.code_of(p.package_name))
        key_col.codes.append(key_col.code_of(p.current_key))
        posted_col.codes.append(-1)
    elif type(p) is AppUsagePayload:
        type_col.codes.append(type_col.code_of(p.kind.value))
        name_col.codes.append(name_col.code_of(p.name))
        pkg_col.codes.append(pkg_col.code_of(p.package_name))
        key_col.codes.append(-1)
        posted_col.codes.append(-1)
    elif type(p) is NotificationPayload:
        type_col.codes.append(-1)
        name_col.codes.append(name_col.code_of(p.name))
        pkg_col.codes.append(pkg_col.code_of(p.package_name))
        key_col.codes.append(-1)
        posted_col.codes.append(posted_col.code_of("true" if p.is_posted else "false"))
    else:
        # opaque payload: codes assigned once the observed key set for
        # this tag is known (see finish_other_columns)
        type_col.codes.append(-1)
        name_col.codes.append(-1)
        pkg_col.codes.append(-1)
        key_col.codes.append(-1)
        posted_col.codes.append(-1)
        other_positions.append(i)
        seen = other_extras.get(rec.datum_type)
        if seen is None:
            seen = other_extras[rec.datum_type] = set()
        seen.update(p.keys())


_OTHER_INDEXABLE = (COL_TYPE, COL_NAME, COL_PACKAGE_NAME, COL_CURRENT_KEY, COL_IS_POSTED)


def finish_other_columns(records, columns, other_positions, other_extras) -> None:
    """Second pass for opaque types: fill columns their tag observed."""
    for pos in other_positions:
        rec = records[pos]
        observed = other_extras[rec.datum_type]
        p = rec.payload
        for col_name in _OTHER_INDEXABLE:
            if col_name in observed:
                col = columns[col_name]
                col.codes[pos] = col.code_of(
                    stringify_value(p.get(col_name)) if col_name in p else ""
                )


class LogDataset:
    """Immutable, timestamp-ordered collection of log records.

    Records must arrive sorted by (timestamp_ms, original input order);
    construction assigns dense record ids equal to list position and
    builds the columnar index that backs the query kernels. The dataset
    takes ownership of the list; nothing mutates it afterwards.
    """

    __slots__ = ("records", "source_digest", "timestamps", "columns", "_other_extras")

    def __init__(self, records: list[LogRecord], source_digest: str, _parts=None):
        if _parts is not None:
            # prebuilt by the ingest fast path, which fuses assembly and
            # indexing into one pass; equivalence with the loop below is
            # property-tested
            self.records = records
            self.source_digest = source_digest
            self.timestamps, self.columns, self._other_extras = _parts
            return
        ts = array("q")
        ts_append = ts.append
        columns = new_column_index()
        other_positions: list[int] = []
        other_extras: dict[str, set] = {}

        prev = -1
        i = 0
        for rec in records:
            if rec.record_id != i:
                rec.record_id = i
            t = rec.timestamp_ms
            if t < prev:
                raise ValueError("records are not sorted by timestamp")
            prev = t
            ts_append(t)
            index_one_record(rec, i, columns, other_positions, other_extras)
            i += 1

        finish_other_columns(records, columns, other_positions, other_extras)

        self.records = records
        self.source_digest = source_digest
        self.timestamps = ts
        self.columns = columns
        self._other_extras = {tag: tuple(sorted(keys)) for tag, keys in other_extras.items()}

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, record_id: int) -> LogRecord:
        return self.records[record_id]

    def __iter__(self) -> Iterator[LogRecord]:
        return iter(self.records)

    def datum_types_present(self) -> list[str]:
        """Distinct datum type tags, sorted."""
        return sorted(self.columns[COL_DATUM_TYPE].values)

    def observed_extras(self, datum_type: str) -> tuple[str, ...]:
        """Sorted payload keys seen for an opaque datum type."""
        return self._other_extras.get(datum_type, ())

    def schema_for(self, datum_type: str) -> tuple[Column, ...]:
        return column_schema(datum_type, self.observed_extras(datum_type))

    def time_span(self) -> tuple[int, int]:
        """(min, max) timestamp; dataset is never empty."""
        return (self.timestamps[0], self.timestamps[-1])
