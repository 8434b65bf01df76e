"""Exception types raised by the log/video workbench core."""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all domain errors."""


class MalformedJsonError(WorkbenchError):
    def __init__(self, line_number: int, detail: str = ""):
        self.line_number = line_number
        self.detail = detail
        msg = f"line {line_number}: not a JSON object"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class MissingFieldError(WorkbenchError):
    def __init__(self, field: str, line_number: int | None = None):
        self.field = field
        self.line_number = line_number
        where = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{where}missing required field '{field}'")


class BadValueError(WorkbenchError):
    def __init__(self, field: str, reason: str, line_number: int | None = None):
        self.field = field
        self.reason = reason
        self.line_number = line_number
        where = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{where}bad value for '{field}': {reason}")


class EmptyInputError(WorkbenchError):
    """Raised when ingestion accepts zero records.

    Carries the (all-rejections) ingest report so callers can still
    show what went wrong line by line.
    """

    def __init__(self, detail: str = "no records accepted"):
        super().__init__(detail)
        self.report = None


class UnknownRecordError(WorkbenchError):
    def __init__(self, record_id: int):
        self.record_id = record_id
        super().__init__(f"no record with id {record_id}")


class AnchorOutOfVideoError(WorkbenchError):
    def __init__(self, video_time_ms: int, duration_ms: int):
        self.video_time_ms = video_time_ms
        self.duration_ms = duration_ms
        super().__init__(
            f"anchor time {video_time_ms} outside [0, {duration_ms})"
        )


class OutOfVideoRangeError(WorkbenchError):
    def __init__(self, video_time_ms: int, duration_ms: int):
        self.video_time_ms = video_time_ms
        self.duration_ms = duration_ms
        super().__init__(
            f"video time {video_time_ms} outside [0, {duration_ms})"
        )


class UnknownColumnError(WorkbenchError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column '{column}' not present in any selected schema")


class KeyPairNotFoundError(WorkbenchError):
    """Raised when a typing-interval query cannot be satisfied.

    ``missing_key`` names the key whose next occurrence was not found.
    """

    def __init__(self, missing_key: str, occurrence: int):
        self.missing_key = missing_key
        self.occurrence = occurrence
        super().__init__(
            f"no occurrence {occurrence} pair: key {missing_key!r} not found"
        )


class OverlappingScriptsError(WorkbenchError):
    def __init__(self, first: str, second: str):
        super().__init__(f"scenario spans overlap: {first} and {second}")


class ConflictingRevisionError(WorkbenchError):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__("project was modified by another writer")


class UnknownProjectError(WorkbenchError):
    def __init__(self, project_id: str):
        self.project_id = project_id
        super().__init__(f"no project '{project_id}'")


class UnknownVideoError(WorkbenchError):
    def __init__(self, video_id: str):
        self.video_id = video_id
        super().__init__(f"no video '{video_id}'")
