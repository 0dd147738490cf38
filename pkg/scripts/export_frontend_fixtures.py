#!/usr/bin/env python3
"""Dump real service responses as fixtures for the frontend test suite.

The console's tests run against these exact wire bodies, so any drift in the
service's JSON shapes shows up as a frontend fixture diff.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fastapi.testclient import TestClient

from flowagent.config import build_runtime, example_config_path, load_config
from flowagent.schema import schema_to_dict
from flowagent.service import create_app
from flowagent.tools import TOOL_SCHEMA_DOCS

OUT = ROOT / "frontend" / "test" / "fixtures"


def write(name: str, doc) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"wrote {(OUT / name).relative_to(ROOT)}")


def main() -> None:
    import tempfile

    demo = json.loads(
        (ROOT / "src" / "flowagent" / "fixtures" / "demo_session.json").read_text("utf-8")
    )
    with tempfile.TemporaryDirectory() as tmp:
        config = load_config(
            example_config_path(), store_dir=Path(tmp) / "store", export_dir=Path(tmp) / "export"
        )
        client = TestClient(create_app(build_runtime(config)))
        client.headers["Authorization"] = "Bearer desk-token"

        session_id = client.post("/sessions").json()["session_id"]
        for text in demo["turns"]:
            client.post(f"/sessions/{session_id}/messages", json={"content": text})
        # a turn that exercises the bounded-retry path (retries_used > 0)
        client.post(
            f"/sessions/{session_id}/messages",
            json={"content": "Give me a mystery box recommendation"},
        )

        write("golden_trace.json", client.get(f"/sessions/{session_id}/trace/0").json())
        write("retry_trace.json", client.get(f"/sessions/{session_id}/trace/3").json())
        write("conversation.json", client.get(f"/conversations/{session_id}").json())
        bad = client.post(
            f"/conversations/{session_id}/corrections",
            json={
                "turn_index": 0,
                "target": "tool_call_arguments",
                "replacement": {"occasion": "birthday", "price_max": "50k"},
            },
        )
        write("correction_rejected.json", {"status": bad.status_code, "body": bad.json()})

    write(
        "schemas.json",
        {name: docs["input"] for name, docs in TOOL_SCHEMA_DOCS.items()},
    )


if __name__ == "__main__":
    main()
