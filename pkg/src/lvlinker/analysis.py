"""App-usage metrics computed straight from a dataset.

Four operations cover the workbench's analysis tasks: typing intervals
between two keys, foreground transitions between two apps, notification
post/remove events, and resume-to-pause app sessions. All are pure
scans over the sorted record list, optionally clipped to a half-open
wall-clock range [from_ms, to_ms) so callers can scope them to one
video's span.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import _kernels
from .errors import KeyPairNotFoundError
from .model import (
    AppUsageEventKind,
    AppUsagePayload,
    KeyLogPayload,
    LogDataset,
    NotificationPayload,
)


@dataclass(frozen=True)
class KeyInterval:
    first_record_id: int
    second_record_id: int
    first_key: str
    second_key: str
    interval_ms: int  # timestamp difference, >= 0


@dataclass(frozen=True)
class AppSession:
    """One resume-to-close interval of an app.

    end_record_id / end_ms are None while the session is open-ended
    (no closing event observed).
    """

    package_name: str
    start_record_id: int
    end_record_id: Optional[int]
    start_ms: int
    end_ms: Optional[int]

    @property
    def closed(self) -> bool:
        return self.end_ms is not None


@dataclass(frozen=True)
class OrphanClose:
    """A pause/stop with no open session to close; reported, not dropped."""

    record_id: int
    timestamp_ms: int
    kind: AppUsageEventKind


@dataclass(frozen=True)
class SessionReport:
    sessions: tuple[AppSession, ...]
    orphans: tuple[OrphanClose, ...]


def _range_bounds(dataset: LogDataset, range_ms) -> tuple[int, int]:
    """Record-id bounds [first, last] for a half-open time range."""
    if range_ms is None:
        return (0, len(dataset) - 1)
    first, last = _kernels.span(dataset.timestamps, range_ms[0], range_ms[1])
    return (first, last)  # (-1, -1) when empty


def typing_interval(
    dataset: LogDataset,
    package_name: str,
    key_a: str,
    key_b: str,
    occurrence: int = 1,
    range_ms: Optional[tuple[int, int]] = None,
) -> KeyInterval:
    """Interval between a typed key_a and the first key_b after it.

    Scans the package's key logs in time order. Each pair anchors on
    the next key_a occurrence and closes on the first key_b strictly
    after it (intermediate keys are allowed; a pair may not reuse the
    anchor record, so key_a == key_b needs two records). Pairs do not
    overlap: the search for pair N+1 starts after pair N's closing
    record. Raises KeyPairNotFoundError naming the missing key.
    """
    if occurrence < 1:
        raise ValueError("occurrence must be >= 1")
    first, last = _range_bounds(dataset, range_ms)
    records = dataset.records
    i = first
    pair = None
    remaining = occurrence
    while remaining > 0:
        a_idx = None
        while 0 <= i <= last:
            rec = records[i]
            p = rec.payload
            if type(p) is KeyLogPayload and p.package_name == package_name and p.current_key == key_a:
                a_idx = i
                break
            i += 1
        if a_idx is None:
            raise KeyPairNotFoundError(key_a, occurrence)
        b_idx = None
        j = a_idx + 1
        while j <= last:
            rec = records[j]
            p = rec.payload
            if type(p) is KeyLogPayload and p.package_name == package_name and p.current_key == key_b:
                b_idx = j
                break
            j += 1
        if b_idx is None:
            raise KeyPairNotFoundError(key_b, occurrence)
        pair = (a_idx, b_idx)
        i = b_idx + 1
        remaining -= 1
    a_idx, b_idx = pair
    return KeyInterval(
        first_record_id=a_idx,
        second_record_id=b_idx,
        first_key=key_a,
        second_key=key_b,
        interval_ms=records[b_idx].timestamp_ms - records[a_idx].timestamp_ms,
    )


def app_transition_count(
    dataset: LogDataset,
    package_a: str,
    package_b: str,
    range_ms: Optional[tuple[int, int]] = None,
) -> int:
    """Foreground switches between two apps.

    Projects the range onto resume events of the two packages,
    collapses consecutive duplicates (resume storms), and counts
    adjacent package changes. Symmetric in (a, b).
    """
    if package_a == package_b:
        raise ValueError("transition counting needs two distinct packages")
    first, last = _range_bounds(dataset, range_ms)
    if first < 0:
        return 0
    count = 0
    prev = None
    pair = (package_a, package_b)
    for rec in dataset.records[first : last + 1]:
        p = rec.payload
        if (
            type(p) is AppUsagePayload
            and p.kind is AppUsageEventKind.RESUMED
            and p.package_name in pair
        ):
            if prev is not None and p.package_name != prev:
                count += 1
            prev = p.package_name
    return count


@dataclass(frozen=True)
class NotificationEvent:
    record_id: int
    timestamp_ms: int
    package_name: str
    is_posted: bool


def notification_events(
    dataset: LogDataset,
    package_name: str,
    range_ms: Optional[tuple[int, int]] = None,
) -> list[NotificationEvent]:
    """All notification records of one package, in time order.

    The first is_posted=True is the "posted" time; the first
    is_posted=False after it is the "unposted" time. Exposed as the raw
    event list so callers can scope each video span separately.
    """
    first, last = _range_bounds(dataset, range_ms)
    if first < 0:
        return []
    out = []
    for rec in dataset.records[first : last + 1]:
        p = rec.payload
        if type(p) is NotificationPayload and p.package_name == package_name:
            out.append(
                NotificationEvent(rec.record_id, rec.timestamp_ms, p.package_name, p.is_posted)
            )
    return out


def app_sessions(
    dataset: LogDataset,
    package_name: str,
    range_ms: Optional[tuple[int, int]] = None,
) -> SessionReport:
    """Resume-to-close sessions of one package.

    Each resume opens a session; the next pause or stop of the same
    package closes it. A second resume while a session is open closes
    the first at the second's timestamp (Android can resume across
    configuration changes without a pause; dropping either event would
    corrupt counts). A close with no open session is reported as an
    orphan. Zero-length results (close at the exact opening
    millisecond) are discarded: a closed session must satisfy
    start < end.
    """
    first, last = _range_bounds(dataset, range_ms)
    sessions: list[AppSession] = []
    orphans: list[OrphanClose] = []
    open_start: Optional[tuple[int, int]] = None  # (record_id, ts)

    if first >= 0:
        for rec in dataset.records[first : last + 1]:
            p = rec.payload
            if type(p) is not AppUsagePayload or p.package_name != package_name:
                continue
            if p.kind is AppUsageEventKind.RESUMED:
                if open_start is not None and rec.timestamp_ms > open_start[1]:
                    sessions.append(
                        AppSession(
                            package_name,
                            open_start[0],
                            rec.record_id,
                            open_start[1],
                            rec.timestamp_ms,
                        )
                    )
                open_start = (rec.record_id, rec.timestamp_ms)
            else:  # paused or stopped
                if open_start is None:
                    orphans.append(OrphanClose(rec.record_id, rec.timestamp_ms, p.kind))
                else:
                    if rec.timestamp_ms > open_start[1]:
                        sessions.append(
                            AppSession(
                                package_name,
                                open_start[0],
                                rec.record_id,
                                open_start[1],
                                rec.timestamp_ms,
                            )
                        )
                    open_start = None

    if open_start is not None:
        sessions.append(AppSession(package_name, open_start[0], None, open_start[1], None))
    return SessionReport(tuple(sessions), tuple(orphans))
