import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import build_dataset, key_line, note_line, usage_line
from lvlinker import model
from lvlinker.ingest import parse_log_line
from lvlinker.model import (
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
    record_value,
    render_row,
    stringify_value,
)
from lvlinker.serialize import record_to_wire


class TestColumnSchema:
    def test_app_usage_event_columns(self):
        names = [c.name for c in column_schema(APP_USAGE_EVENT)]
        assert names == ["timestamp", "datumType", "type", "name", "packageName"]

    def test_key_log_columns(self):
        names = [c.name for c in column_schema(KEY_LOG)]
        assert names == ["timestamp", "datumType", "currentKey", "timeTaken", "name", "packageName"]

    def test_notification_columns(self):
        names = [c.name for c in column_schema(NOTIFICATION)]
        assert names == ["timestamp", "datumType", "isPosted", "name", "packageName"]

    def test_other_columns_metadata_plus_sorted_extras(self):
        names = [c.name for c in column_schema("DEVICE_EVENT", observed_extras=["z", "a"])]
        assert names == ["timestamp", "datumType", "a", "z"]

    def test_schema_is_case_insensitive_on_type_tag(self):
        assert column_schema("key_log") == column_schema(KEY_LOG)


class TestDatumType:
    def test_named_types_canonical(self):
        assert model.canonical_datum_type("app_usage_event") == APP_USAGE_EVENT
        assert model.canonical_datum_type("Key_Log") == KEY_LOG
        assert model.canonical_datum_type("NOTIFICATION") == NOTIFICATION

    def test_unknown_tag_preserved_verbatim(self):
        assert model.canonical_datum_type("Device_Event") == "Device_Event"
        assert not model.is_named_datum_type("DEVICE_EVENT")


class TestAppUsageEventKind:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("Activity_resumed", AppUsageEventKind.RESUMED),
            ("ACTIVITY_PAUSED", AppUsageEventKind.PAUSED),
            ("activity_stopped", AppUsageEventKind.STOPPED),
        ],
    )
    def test_parse_case_insensitive(self, raw, expected):
        assert AppUsageEventKind.parse(raw) is expected

    def test_parse_unknown_raises(self):
        with pytest.raises(ValueError):
            AppUsageEventKind.parse("Activity_destroyed")

    def test_exactly_three_kinds(self):
        assert len(AppUsageEventKind) == 3


class TestStringify:
    def test_cases(self):
        assert stringify_value(None) == ""
        assert stringify_value(True) == "true"
        assert stringify_value(False) == "false"
        assert stringify_value(42) == "42"
        assert stringify_value("x") == "x"
        assert stringify_value({"b": 1, "a": 2}) == '{"a":2,"b":1}'


class TestRenderRow:
    def test_every_schema_column_has_a_value(self):
        ds = build_dataset(
            [
                key_line(1000, "a"),
                usage_line(2000, "Activity_resumed"),
                note_line(3000, True),
                json.dumps({"timestamp": 4000, "datumType": "DEVICE_EVENT", "type": "screen_on"}),
                json.dumps({"timestamp": 5000, "datumType": "DEVICE_EVENT", "battery": 80}),
            ]
        )
        for rec in ds:
            row = render_row(rec, ds.observed_extras(rec.datum_type))
            schema = ds.schema_for(rec.datum_type)
            assert set(row) == {c.name for c in schema}
            assert all(isinstance(v, str) for v in row.values())

    def test_missing_extras_render_empty(self):
        ds = build_dataset(
            [
                json.dumps({"timestamp": 4000, "datumType": "DEVICE_EVENT", "type": "screen_on"}),
                json.dumps({"timestamp": 5000, "datumType": "DEVICE_EVENT", "battery": 80}),
            ]
        )
        row = render_row(ds[0], ds.observed_extras("DEVICE_EVENT"))
        assert row["type"] == "screen_on"
        assert row["battery"] == ""

    def test_record_value_none_for_foreign_column(self):
        rec = parse_log_line(note_line(1000, True), 1)
        assert record_value(rec, "currentKey") is None
        assert record_value(rec, "isPosted") == "true"


class TestVideoMeta:
    def test_duration_must_be_positive(self):
        with pytest.raises(ValueError):
            VideoMeta("v", "u", "t", 0, 0)

    def test_effective_start(self):
        v = VideoMeta("v", "u", "t", 1000, 10, sync_offset_ms=-25)
        assert v.effective_start_ms == 975


class TestLogDataset:
    def test_rejects_unsorted_records(self):
        recs = [
            LogRecord(0, 2000, KEY_LOG, KeyLogPayload("a", 1, "A", "p")),
            LogRecord(1, 1000, KEY_LOG, KeyLogPayload("b", 1, "A", "p")),
        ]
        with pytest.raises(ValueError):
            LogDataset(recs, "d")

    def test_assigns_dense_ids(self):
        recs = [
            LogRecord(-1, 1000, KEY_LOG, KeyLogPayload("a", 1, "A", "p")),
            LogRecord(-1, 2000, KEY_LOG, KeyLogPayload("b", 1, "A", "p")),
        ]
        ds = LogDataset(recs, "d")
        assert [r.record_id for r in ds] == [0, 1]
        assert len(ds) == 2
        assert ds.time_span() == (1000, 2000)

    def test_columnar_index_matches_record_values(self):
        ds = build_dataset(
            [
                key_line(1000, "a", pkg="com.x"),
                usage_line(2000, "Activity_paused", pkg="com.y"),
                note_line(3000, False, pkg="com.x"),
                json.dumps(
                    {"timestamp": 4000, "datumType": "DEVICE_EVENT", "type": "screen_on"}
                ),
            ]
        )
        for col_name, col in ds.columns.items():
            for i, rec in enumerate(ds):
                code = col.codes[i]
                expected = record_value(rec, col_name)
                if expected is None and col_name in ds.observed_extras(rec.datum_type):
                    expected = ""
                if code < 0:
                    assert expected is None
                else:
                    assert col.values[code] == expected


# serialization round trip: record -> wire -> record is identity, extras included

_extras = st.dictionaries(
    st.text(min_size=1, max_size=8).filter(
        lambda s: s.lower()
        not in {
            "timestamp",
            "datumtype",
            "currentkey",
            "timetaken",
            "name",
            "packagename",
            "isposted",
            "type",
        }
    ),
    st.one_of(st.integers(-1000, 1000), st.text(max_size=6), st.booleans(), st.none()),
    max_size=3,
)

_payloads = st.one_of(
    st.builds(
        KeyLogPayload,
        st.text(min_size=1, max_size=3),
        st.integers(0, 5000),
        st.text(max_size=10),
        st.text(min_size=1, max_size=12),
    ),
    st.builds(
        AppUsagePayload,
        st.sampled_from(list(AppUsageEventKind)),
        st.text(max_size=10),
        st.text(min_size=1, max_size=12),
    ),
    st.builds(
        NotificationPayload,
        st.booleans(),
        st.text(max_size=10),
        st.text(min_size=1, max_size=12),
    ),
)


@st.composite
def _records(draw):
    payload = draw(_payloads)
    dt = {
        KeyLogPayload: KEY_LOG,
        AppUsagePayload: APP_USAGE_EVENT,
        NotificationPayload: NOTIFICATION,
    }[type(payload)]
    return LogRecord(-1, draw(st.integers(1, 2**52)), dt, payload, draw(_extras))


@given(_records())
@settings(max_examples=200)
def test_wire_round_trip_is_identity(record):
    line = json.dumps(record_to_wire(record), ensure_ascii=False)
    back = parse_log_line(line, 1)
    assert back == record


@given(_records())
@settings(max_examples=100)
def test_every_schema_column_renders(record):
    row = render_row(record)
    assert set(row) == {c.name for c in column_schema(record.datum_type)}
    assert all(isinstance(v, str) for v in row.values())
