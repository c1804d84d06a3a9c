"""Record a real service session as replayable fixtures for the console tests.

Drives the Python session service through a full 3-round session on the
62-node demo network and captures every HTTP exchange verbatim.  Rerun after
changing the service:

    python frontend/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from dimeplan.service import create_app

ROOT = Path(__file__).parent
NETWORK = json.loads((ROOT.parent / "demos" / "networks" / "youth62.json").read_text())
OUT = ROOT / "test" / "fixtures" / "recorded-session.json"


def main() -> None:
    client = TestClient(create_app())
    exchanges = []

    def call(method: str, path: str, body=None):
        r = client.request(method, path, json=body)
        exchanges.append(
            {
                "method": method,
                "path": path,
                "request": body,
                "status": r.status_code,
                "response": r.json(),
            }
        )
        r.raise_for_status()
        return r.json()

    created = call("POST", "/sessions", {
        "network": NETWORK,
        "config": {"K": 4, "T": 3, "L": 2, "planner": "heal",
                   "planner_params": {"delta": 4}, "seed": 62},
    })
    sid = created["id"]

    # states are recorded after every step so a replaying mock can serve the
    # right snapshot no matter when the console refetches
    call("GET", f"/sessions/{sid}")
    for _ in range(3):
        rec = call("GET", f"/sessions/{sid}/recommendation")
        # replay idempotence is part of what the console relies on
        call("GET", f"/sessions/{sid}/recommendation")
        call("GET", f"/sessions/{sid}")
        edges = rec["rationale"]["observed_edges"]
        call("POST", f"/sessions/{sid}/observation", {
            "edges": {str(e): 1 if i % 2 == 0 else 0 for i, e in enumerate(edges)},
            "attended": rec["action"],
        })
        call("GET", f"/sessions/{sid}")
    call("GET", f"/sessions/{sid}/export")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"session_id": sid, "exchanges": exchanges}, indent=1))
    print(f"recorded {len(exchanges)} exchanges to {OUT}")


if __name__ == "__main__":
    main()
