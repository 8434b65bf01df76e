import random

import pytest

from lvlinker import testkit
from lvlinker.ingest import ingest_log_file
from lvlinker.model import (
    AppUsageEventKind,
    AppUsagePayload,
    KeyLogPayload,
    LogDataset,
    LogRecord,
    NotificationPayload,
    VideoMeta,
)

PKGS = ["com.app.alpha", "com.app.beta", "com.app.gamma"]
NAMES = {"com.app.alpha": "Alpha", "com.app.beta": "Beta", "com.app.gamma": "Gamma"}


def key_line(ts, key, taken=100, pkg="com.app.alpha", name=None):
    import json

    return json.dumps(
        {
            "timestamp": ts,
            "datumType": "KEY_LOG",
            "currentKey": key,
            "timeTaken": taken,
            "name": name or NAMES.get(pkg, "App"),
            "packageName": pkg,
        }
    )


def usage_line(ts, kind, pkg="com.app.alpha", name=None):
    import json

    return json.dumps(
        {
            "timestamp": ts,
            "datumType": "APP_USAGE_EVENT",
            "type": kind,
            "name": name or NAMES.get(pkg, "App"),
            "packageName": pkg,
        }
    )


def note_line(ts, posted, pkg="com.app.alpha", name=None):
    import json

    return json.dumps(
        {
            "timestamp": ts,
            "datumType": "NOTIFICATION",
            "isPosted": posted,
            "name": name or NAMES.get(pkg, "App"),
            "packageName": pkg,
        }
    )


def build_dataset(lines) -> LogDataset:
    data = ("\n".join(lines) + "\n").encode()
    dataset, report = ingest_log_file(data)
    assert report.records_rejected == 0, report.rejections
    return dataset


def random_records(rng: random.Random, n: int, t0: int = 1_000_000, spread: int = 120_000):
    """n records of mixed types with non-decreasing timestamps."""
    records = []
    t = t0
    for i in range(n):
        t += rng.randint(0, max(1, spread // max(n, 1)))
        roll = rng.random()
        pkg = rng.choice(PKGS)
        name = NAMES[pkg]
        if roll < 0.4:
            payload = KeyLogPayload(rng.choice("abcdexyz "), rng.randint(0, 400), name, pkg)
            dt = "KEY_LOG"
        elif roll < 0.7:
            payload = AppUsagePayload(rng.choice(list(AppUsageEventKind)), name, pkg)
            dt = "APP_USAGE_EVENT"
        elif roll < 0.9:
            payload = NotificationPayload(rng.random() < 0.5, name, pkg)
            dt = "NOTIFICATION"
        else:
            payload = {"type": rng.choice(["screen_on", "screen_off"]), "battery": rng.randint(0, 100)}
            dt = "DEVICE_EVENT"
        records.append(LogRecord(i, t, dt, payload))
    return records


def random_dataset(rng: random.Random, n: int, **kw) -> LogDataset:
    return LogDataset(random_records(rng, n, **kw), f"test-{n}-{rng.random()}")


def make_video(start_ms: int, duration_ms: int = 360_000, offset: int = 0, vid="v1") -> VideoMeta:
    return VideoMeta(
        video_id=vid,
        uri=f"placeholder://{vid}",
        title="Test video",
        start_epoch_ms=start_ms,
        duration_ms=duration_ms,
        sync_offset_ms=offset,
    )


@pytest.fixture(scope="session")
def send_sms_generated():
    return testkit.generate_scenario(testkit.ScenarioScript("send-sms", 1))


@pytest.fixture(scope="session")
def send_sms_dataset(send_sms_generated):
    dataset, report = ingest_log_file(send_sms_generated.jsonl_bytes())
    assert report.records_rejected == 0
    return dataset
