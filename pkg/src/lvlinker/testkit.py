"""Deterministic synthetic log streams for five scripted app scenarios.

Each scenario choreographs a six-minute session (answering a call,
replying to an SMS, taking pictures then pruning one in the gallery,
sharing a map route, transferring money) as a JSONL stream plus a
matching video descriptor. The metrics a analyst would extract (typing
interval, app transitions, notification post/remove times, session
bounds) are decided while generating and returned as planted truth, so
tests get an oracle that does not depend on the analysis code.

Determinism: identical (kind, seed) produce byte-identical streams.
Key bursts draw per-key latency from a seeded uniform [80, 400] ms; the
first key of a burst carries timeTaken 0. Every stream also sprinkles
excluded-category records (device events, touch interactions, call/SMS)
so fixtures exercise opaque datum types.

Planted typing pairs use sentinel keys 'q' and 'z': burst bodies avoid
both, the generator inserts each exactly once and records the exact
interval between them.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import NamedTuple

from .errors import OverlappingScriptsError
from .model import VideoMeta

SCENARIO_KINDS = (
    "answer-call",
    "send-sms",
    "take-pictures",
    "share-route",
    "transfer-money",
)

SCENARIO_DURATION_MS = 360_000  # six-minute sessions
DEFAULT_START_EPOCH_MS = 1_650_000_000_000

SENTINEL_KEY_A = "q"
SENTINEL_KEY_B = "z"
_BURST_ALPHABET = "abcdefghijklmnoprstuvwxy "  # no sentinels
_DIGIT_ALPHABET = "0123456789"
KEY_JITTER_MS = (80, 400)


class App(NamedTuple):
    name: str
    package: str


HOME = App("Home", "com.android.launcher3")
PHONE = App("Phone", "com.android.dialer")
MESSAGES = App("Messages", "com.android.messaging")
CAMERA = App("Camera", "com.android.camera2")
GALLERY = App("Gallery", "com.android.gallery3d")
MAPS = App("Maps", "com.google.android.apps.maps")
BANK = App("Bank", "com.bank.mobile")


@dataclass(frozen=True)
class ScenarioScript:
    kind: str  # one of SCENARIO_KINDS
    seed: int
    start_epoch_ms: int = DEFAULT_START_EPOCH_MS

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")

    @property
    def video_id(self) -> str:
        return f"{self.kind}-{self.seed}"


@dataclass
class GeneratedScenario:
    script: ScenarioScript
    lines: list[str]
    video: VideoMeta
    truth: dict

    def jsonl_bytes(self) -> bytes:
        return ("\n".join(self.lines) + "\n").encode()


@dataclass
class GeneratedSession:
    lines: list[str]
    videos: list[VideoMeta]
    truths: list[dict]

    def jsonl_bytes(self) -> bytes:
        return ("\n".join(self.lines) + "\n").encode()


def _rng_for(script: ScenarioScript) -> random.Random:
    digest = hashlib.sha256(f"{script.kind}:{script.seed}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class _Stream:
    """Event accumulator with a bounded clock."""

    def __init__(self, rng: random.Random, start_ms: int):
        self.rng = rng
        self.t = start_ms
        self.deadline = start_ms + SCENARIO_DURATION_MS
        self.events: list[dict] = []

    def gap(self, lo: int, hi: int) -> int:
        self.t += self.rng.randint(lo, hi)
        if self.t >= self.deadline:
            raise AssertionError("scenario choreography overran the video span")
        return self.t

    def emit(self, ts: int, obj: dict) -> None:
        self.events.append({"timestamp": ts, **obj})

    def usage(self, app: App, kind: str, lo: int = 80, hi: int = 400) -> int:
        ts = self.gap(lo, hi)
        self.emit(ts, {
            "datumType": "APP_USAGE_EVENT",
            "type": kind,
            "name": app.name,
            "packageName": app.package,
        })
        return ts

    def resume(self, app: App, lo: int = 80, hi: int = 400) -> int:
        return self.usage(app, "Activity_resumed", lo, hi)

    def pause(self, app: App, lo: int = 80, hi: int = 400) -> int:
        return self.usage(app, "Activity_paused", lo, hi)

    def stop(self, app: App, lo: int = 80, hi: int = 400) -> int:
        return self.usage(app, "Activity_stopped", lo, hi)

    def notification(self, app: App, posted: bool, lo: int, hi: int) -> int:
        ts = self.gap(lo, hi)
        self.emit(ts, {
            "datumType": "NOTIFICATION",
            "isPosted": posted,
            "name": app.name,
            "packageName": app.package,
        })
        return ts

    def device_event(self, event: str, lo: int = 300, hi: int = 1500) -> int:
        ts = self.gap(lo, hi)
        self.emit(ts, {"datumType": "DEVICE_EVENT", "type": event})
        return ts

    def touch(self, app: App, lo: int = 200, hi: int = 900) -> int:
        ts = self.gap(lo, hi)
        self.emit(ts, {
            "datumType": "TOUCH_INTERACTION",
            "touchType": "click",
            "name": app.name,
            "packageName": app.package,
        })
        return ts

    def burst(self, app: App, keys: str, lead_lo: int = 800, lead_hi: int = 2500) -> dict[int, int]:
        """Type a key sequence; returns {position: timestamp}."""
        jitter_lo, jitter_hi = KEY_JITTER_MS
        times: dict[int, int] = {}
        for pos, key in enumerate(keys):
            if pos == 0:
                ts = self.gap(lead_lo, lead_hi)
                taken = 0
            else:
                taken = self.rng.randint(jitter_lo, jitter_hi)
                ts = self.gap(taken, taken)
            times[pos] = ts
            self.emit(ts, {
                "datumType": "KEY_LOG",
                "currentKey": key,
                "timeTaken": taken,
                "name": app.name,
                "packageName": app.package,
            })
        return times


def _sentinel_body(rng: random.Random, alphabet: str, lo_len: int, hi_len: int) -> tuple[str, int, int]:
    """Random keys with exactly one 'q' then one 'z' planted inside."""
    body = [rng.choice(alphabet) for _ in range(rng.randint(lo_len, hi_len))]
    a_pos = rng.randint(1, len(body) // 2)
    b_pos = rng.randint(len(body) // 2 + 1, len(body) - 1)
    body.insert(a_pos, SENTINEL_KEY_A)
    body.insert(b_pos + 1, SENTINEL_KEY_B)  # +1: list grew by one before it
    return "".join(body), a_pos, b_pos + 1


def _typed_interval(s: _Stream, app: App, rng: random.Random, alphabet: str = _BURST_ALPHABET) -> int:
    keys, a_pos, b_pos = _sentinel_body(rng, alphabet, 14, 24)
    times = s.burst(app, keys)
    return times[b_pos] - times[a_pos]


def _answer_call(s: _Stream, rng: random.Random) -> dict:
    s.device_event("screen_on", 1500, 4000)
    s.resume(HOME, 300, 1200)
    posted = s.notification(PHONE, True, 3000, 12000)
    ts = s.gap(50, 300)
    s.emit(ts, {"datumType": "CALL_SMS", "callType": "incoming", "number": "+15550100"})
    s.pause(HOME, 800, 2500)
    session_start = s.resume(PHONE)
    unposted = s.notification(PHONE, False, 500, 2000)
    s.touch(PHONE)
    session_end = s.pause(PHONE, 45_000, 120_000)
    s.resume(HOME)
    return {
        "params": {
            "transitionA": PHONE.package,
            "transitionB": HOME.package,
            "notifyPackage": PHONE.package,
            "sessionPackage": PHONE.package,
        },
        "metrics": {
            "transitionCount": 2,
            "notificationPostedMs": posted,
            "notificationUnpostedMs": unposted,
            "sessionBounds": [[session_start, session_end]],
        },
    }


def _send_sms(s: _Stream, rng: random.Random) -> dict:
    s.device_event("screen_on", 1500, 4000)
    s.resume(HOME, 300, 1200)
    posted = s.notification(MESSAGES, True, 3000, 10_000)
    s.touch(HOME)
    s.pause(HOME, 1000, 3000)
    session_start = s.resume(MESSAGES)
    unposted = s.notification(MESSAGES, False, 400, 1500)
    interval = _typed_interval(s, MESSAGES, rng)
    s.touch(MESSAGES)  # send
    session_end = s.pause(MESSAGES, 1500, 4000)
    s.resume(HOME)
    return {
        "params": {
            "typingPackage": MESSAGES.package,
            "keyA": SENTINEL_KEY_A,
            "keyB": SENTINEL_KEY_B,
            "transitionA": MESSAGES.package,
            "transitionB": HOME.package,
            "notifyPackage": MESSAGES.package,
            "sessionPackage": MESSAGES.package,
        },
        "metrics": {
            "typingIntervalMs": interval,
            "transitionCount": 2,
            "notificationPostedMs": posted,
            "notificationUnpostedMs": unposted,
            "sessionBounds": [[session_start, session_end]],
        },
    }


def _take_pictures(s: _Stream, rng: random.Random) -> dict:
    s.device_event("screen_on", 1500, 4000)
    s.resume(HOME, 300, 1200)
    posted = s.notification(MESSAGES, True, 2000, 6000)
    s.pause(HOME, 800, 2500)

    transitions = rng.randint(2, 5)
    camera_bounds = []
    visiting_camera = True
    start = s.resume(CAMERA)
    for _ in range(transitions):
        for _ in range(rng.randint(1, 3)):
            s.touch(CAMERA if visiting_camera else GALLERY, 1500, 6000)
        if visiting_camera:
            end = s.stop(CAMERA, 2000, 8000)
            camera_bounds.append([start, end])
            start = s.resume(GALLERY)
        else:
            s.pause(GALLERY, 2000, 8000)
            start = s.resume(CAMERA)
        visiting_camera = not visiting_camera
    if visiting_camera:
        end = s.stop(CAMERA, 2000, 8000)
        camera_bounds.append([start, end])
    else:
        s.touch(GALLERY, 1500, 6000)  # delete one picture
        s.pause(GALLERY, 2000, 8000)
    unposted = s.notification(MESSAGES, False, 500, 2000)
    s.resume(HOME)
    return {
        "params": {
            "transitionA": CAMERA.package,
            "transitionB": GALLERY.package,
            "notifyPackage": MESSAGES.package,
            "sessionPackage": CAMERA.package,
        },
        "metrics": {
            "transitionCount": transitions,
            "notificationPostedMs": posted,
            "notificationUnpostedMs": unposted,
            "sessionBounds": camera_bounds,
        },
    }


def _share_route(s: _Stream, rng: random.Random) -> dict:
    s.device_event("screen_on", 1500, 4000)
    s.resume(HOME, 300, 1200)
    posted = s.notification(MESSAGES, True, 3000, 9000)
    s.pause(HOME, 800, 2500)
    s.resume(MESSAGES)
    unposted = s.notification(MESSAGES, False, 400, 1500)
    s.pause(MESSAGES, 2000, 6000)
    maps_start = s.resume(MAPS)
    interval = _typed_interval(s, MAPS, rng)
    for _ in range(rng.randint(1, 3)):
        s.touch(MAPS, 1000, 5000)  # pick route, share sheet
    maps_end = s.pause(MAPS, 2000, 8000)
    s.resume(MESSAGES)
    s.burst(MESSAGES, "".join(rng.choice(_BURST_ALPHABET) for _ in range(rng.randint(5, 10))))
    s.touch(MESSAGES)  # send the link
    s.pause(MESSAGES, 1500, 4000)
    s.resume(HOME)
    return {
        "params": {
            "typingPackage": MAPS.package,
            "keyA": SENTINEL_KEY_A,
            "keyB": SENTINEL_KEY_B,
            "transitionA": MESSAGES.package,
            "transitionB": MAPS.package,
            "notifyPackage": MESSAGES.package,
            "sessionPackage": MAPS.package,
        },
        "metrics": {
            "typingIntervalMs": interval,
            "transitionCount": 2,
            "notificationPostedMs": posted,
            "notificationUnpostedMs": unposted,
            "sessionBounds": [[maps_start, maps_end]],
        },
    }


def _transfer_money(s: _Stream, rng: random.Random) -> dict:
    s.device_event("screen_on", 1500, 4000)
    s.resume(HOME, 300, 1200)
    posted = s.notification(MESSAGES, True, 3000, 9000)
    s.pause(HOME, 800, 2500)
    s.resume(MESSAGES)
    unposted = s.notification(MESSAGES, False, 400, 1500)
    s.pause(MESSAGES, 3000, 9000)
    bank_start = s.resume(BANK)
    s.touch(BANK, 1000, 4000)  # open transfer form
    interval = _typed_interval(s, BANK, rng, alphabet=_DIGIT_ALPHABET)
    s.touch(BANK, 1000, 4000)  # confirm
    s.device_event("screen_dim", 2000, 10_000)
    bank_end = s.pause(BANK, 2000, 10_000)
    s.resume(HOME)
    return {
        "params": {
            "typingPackage": BANK.package,
            "keyA": SENTINEL_KEY_A,
            "keyB": SENTINEL_KEY_B,
            "transitionA": MESSAGES.package,
            "transitionB": BANK.package,
            "notifyPackage": MESSAGES.package,
            "sessionPackage": BANK.package,
        },
        "metrics": {
            "typingIntervalMs": interval,
            "transitionCount": 1,
            "notificationPostedMs": posted,
            "notificationUnpostedMs": unposted,
            "sessionBounds": [[bank_start, bank_end]],
        },
    }


_CHOREOGRAPHIES = {
    "answer-call": _answer_call,
    "send-sms": _send_sms,
    "take-pictures": _take_pictures,
    "share-route": _share_route,
    "transfer-money": _transfer_money,
}

_TITLES = {
    "answer-call": "Answering a call",
    "send-sms": "Sending an SMS reply",
    "take-pictures": "Taking pictures",
    "share-route": "Sharing a route",
    "transfer-money": "Transferring money",
}


def _emit_lines(events: list[dict]) -> list[str]:
    events.sort(key=lambda e: e["timestamp"])  # stable: emission order kept on ties
    return [json.dumps(e, separators=(",", ":"), ensure_ascii=False) for e in events]


def _scenario_events(script: ScenarioScript) -> tuple[list[dict], VideoMeta, dict]:
    rng = _rng_for(script)
    stream = _Stream(rng, script.start_epoch_ms)
    truth = _CHOREOGRAPHIES[script.kind](stream, rng)
    video = VideoMeta(
        video_id=script.video_id,
        uri=f"placeholder://{script.video_id}",
        title=f"{_TITLES[script.kind]} (seed {script.seed})",
        start_epoch_ms=script.start_epoch_ms,
        duration_ms=SCENARIO_DURATION_MS,
    )
    truth = {
        "scenario": script.kind,
        "seed": script.seed,
        "videoId": script.video_id,
        **truth,
    }
    return stream.events, video, truth


def generate_scenario(script: ScenarioScript) -> GeneratedScenario:
    """One scenario's JSONL lines, video descriptor, and planted truth."""
    events, video, truth = _scenario_events(script)
    return GeneratedScenario(script, _emit_lines(events), video, truth)


def generate_mixed_session(scripts: list[ScenarioScript]) -> GeneratedSession:
    """Several scenarios merged into one globally sorted log stream.

    Scenario time spans must be pairwise disjoint (each spans
    [start_epoch_ms, start_epoch_ms + 6 min)); the per-video record
    ranges stay recoverable from the combined stream.
    """
    spans = sorted(
        ((s.start_epoch_ms, s.start_epoch_ms + SCENARIO_DURATION_MS, s) for s in scripts),
        key=lambda span: span[:2],
    )
    for (_, prev_end, prev), (start, _, cur) in zip(spans, spans[1:]):
        if start < prev_end:
            raise OverlappingScriptsError(prev.video_id, cur.video_id)

    all_events: list[dict] = []
    videos: list[VideoMeta] = []
    truths: list[dict] = []
    for script in scripts:
        events, video, truth = _scenario_events(script)
        all_events.extend(events)
        videos.append(video)
        truths.append(truth)
    return GeneratedSession(_emit_lines(all_events), videos, truths)


def manifest_json(videos: list[VideoMeta]) -> str:
    """Video manifest document for the given descriptors."""
    return json.dumps(
        [
            {
                "videoId": v.video_id,
                "uri": v.uri,
                "title": v.title,
                "startEpochMs": v.start_epoch_ms,
                "durationMs": v.duration_ms,
                "syncOffsetMs": v.sync_offset_ms,
            }
            for v in videos
        ],
        indent=2,
    )
