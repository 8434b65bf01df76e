#!/usr/bin/env python3
"""Dump generator-backed API responses as JSON fixtures for the UI tests.

Run from the repository root after installing the Python package:

    python frontend/scripts/make_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from lvlinker import testkit
from lvlinker.api import create_app
from lvlinker.testkit import ScenarioScript, generate_scenario

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    generated = generate_scenario(ScenarioScript("send-sms", 1))
    app = create_app(tempfile.mkdtemp())
    with TestClient(app) as client:
        r = client.post("/projects", json={"name": "send-sms fixture"})
        pid = r.json()["project"]["projectId"]
        client.post(f"/projects/{pid}/logs", content=generated.jsonl_bytes())
        client.post(
            f"/projects/{pid}/videos",
            content=testkit.manifest_json([generated.video]).encode(),
        )
        project = client.get(f"/projects/{pid}").json()
        rows = client.get(f"/projects/{pid}/rows", params={"limit": 10_000}).json()
        schema = client.get(f"/projects/{pid}/schema").json()
        vid = generated.video.video_id
        markers_note = client.get(
            f"/projects/{pid}/videos/{vid}/markers", params={"datumTypes": "NOTIFICATION"}
        ).json()
        markers_all = client.get(f"/projects/{pid}/videos/{vid}/markers").json()
        distinct_pkg = client.get(
            f"/projects/{pid}/distinct", params={"column": "packageName"}
        ).json()

    fixture = {
        "project": project["project"],
        "rows": rows["rows"],
        "total": rows["total"],
        "schema": schema,
        "markersNotification": markers_note["markers"],
        "markersAll": markers_all["markers"],
        "distinctPackageName": distinct_pkg["values"],
        "truth": generated.truth,
    }
    path = OUT / "send_sms_project.json"
    path.write_text(json.dumps(fixture, indent=1, sort_keys=True) + "\n")
    print(f"wrote {path} ({path.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
