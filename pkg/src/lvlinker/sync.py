"""Bidirectional mapping between log epoch time and video playback time.

A video's frame 0 sits at effective_start_ms = start_epoch_ms +
sync_offset_ms on the log's wall clock. The offset comes from one
manual anchor: the user marks a single log record (a key typing event
works well, it is visible in both streams) at the playback position
where it appears on screen, and the additive offset follows exactly.
Residual error beyond one anchor (clock drift, frame quantization) is
accepted, not modeled.

All functions are pure; `calibrate` returns a new VideoMeta. Integer
arithmetic throughout, so round trips are exact.
"""

from __future__ import annotations

from array import array
from typing import NamedTuple, Optional, Sequence

from . import _kernels
from .errors import AnchorOutOfVideoError, OutOfVideoRangeError, UnknownRecordError
from .model import LogDataset, VideoMeta


class SyncAnchor(NamedTuple):
    """One (log record, playback position) correspondence."""

    record_id: int
    video_time_ms: int


class MappedVideoTime(NamedTuple):
    """Result of mapping a log time onto a video's timeline.

    ms is the raw signed playback position; in_range says whether it
    falls inside [0, duration). Out-of-range values are data, not
    errors: callers clamp them for display.
    """

    ms: int
    in_range: bool


def calibrate(video: VideoMeta, dataset: LogDataset, anchor: SyncAnchor) -> VideoMeta:
    """Derive sync_offset_ms from one anchor; other fields unchanged.

    After calibration the anchored record maps exactly to the anchor's
    playback position.
    """
    if not 0 <= anchor.record_id < len(dataset):
        raise UnknownRecordError(anchor.record_id)
    if not 0 <= anchor.video_time_ms < video.duration_ms:
        raise AnchorOutOfVideoError(anchor.video_time_ms, video.duration_ms)
    record_ts = dataset.timestamps[anchor.record_id]
    offset = record_ts - video.start_epoch_ms - anchor.video_time_ms
    return VideoMeta(
        video_id=video.video_id,
        uri=video.uri,
        title=video.title,
        start_epoch_ms=video.start_epoch_ms,
        duration_ms=video.duration_ms,
        sync_offset_ms=offset,
    )


def log_time_to_video_time(video: VideoMeta, t_log_ms: int) -> MappedVideoTime:
    """Playback position of a log timestamp on this video."""
    raw = t_log_ms - video.effective_start_ms
    return MappedVideoTime(raw, 0 <= raw < video.duration_ms)


def video_time_to_log_time(video: VideoMeta, t_vid_ms: int) -> int:
    """Log epoch time of a playback position; exact inverse of
    log_time_to_video_time on [0, duration)."""
    if not 0 <= t_vid_ms < video.duration_ms:
        raise OutOfVideoRangeError(t_vid_ms, video.duration_ms)
    return t_vid_ms + video.effective_start_ms


def record_at_video_time(
    dataset: LogDataset,
    video: VideoMeta,
    t_vid_ms: int,
    view: Optional[Sequence[int]] = None,
) -> Optional[int]:
    """Record to highlight for a playback position.

    Latest record at-or-before the frame's wall-clock time (the screen
    shows the effects of already-logged events), ties broken toward the
    greatest record id. Restricted to `view` (an ordered subset of
    record ids, e.g. a filtered view) when given. None when no record
    precedes the frame.
    """
    t_log = video_time_to_log_time(video, t_vid_ms)
    ts = dataset.timestamps
    if view is None:
        i = _kernels.predecessor(ts, t_log)
        return None if i < 0 else i
    if type(view) is not array:
        view = array("q", view)
    j = _kernels.predecessor_in(ts, view, t_log)
    return None if j < 0 else view[j]


def video_span_records(dataset: LogDataset, video: VideoMeta) -> Optional[tuple[int, int]]:
    """Contiguous (first, last) record ids inside the video's span.

    The span is the half-open wall-clock interval
    [effective_start, effective_start + duration). None when empty.
    """
    lo = video.effective_start_ms
    first, last = _kernels.span(dataset.timestamps, lo, lo + video.duration_ms)
    if first < 0:
        return None
    return (first, last)
