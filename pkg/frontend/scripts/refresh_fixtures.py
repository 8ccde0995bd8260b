#!/usr/bin/env python3
"""Recapture the viewer's test fixtures from the analysis API.

Every JSON file under frontend/tests/fixtures/ is a verbatim HTTP response
body from the analysis service running over the scripted fixture repository,
so the viewer tests consume exactly what a browser would receive. Rerun this
after any change to the scene or document formats:

    python3 frontend/scripts/refresh_fixtures.py
"""

import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "tests"))

from fastapi.testclient import TestClient

from evocity.api import create_app
from fixture_repo import build_fixture

OUT = ROOT / "frontend" / "tests" / "fixtures"
SCENE_ORDINALS = (0, 5, 11)
ACCOUNT_ARTIFACT = "hfaa6e89704f3"


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        repo = build_fixture(Path(tmp) / "repo")
        app = create_app(str(Path(tmp) / "data"))
        client = TestClient(app)

        response = client.post("/api/v1/analyze", json={"repo_url": str(repo)})
        response.raise_for_status()
        pid = response.json()["project_id"]
        app.state.jobs.wait_all(timeout=120)

        def save(name: str, path: str) -> None:
            body = client.get(f"/api/v1{path}")
            body.raise_for_status()
            (OUT / f"{name}.json").write_bytes(body.content)
            print(f"{name}.json: {len(body.content)} bytes")

        save("record", f"/projects/{pid}")
        save("timeline", f"/projects/{pid}/timeline")
        for ordinal in SCENE_ORDINALS:
            save(f"scene_{ordinal}", f"/projects/{pid}/scenes/{ordinal}")
        save("entity_account", f"/projects/{pid}/entities/{ACCOUNT_ARTIFACT}/history")


if __name__ == "__main__":
    main()
