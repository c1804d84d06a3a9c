"""Drive the session service the way the browser console does.

Start the server separately with

    python -m dimeplan.service --port 8000 --data-dir /tmp/dimeplan-sessions

and run this script, or let it spin up an in-process client (default).
"""

import json
import sys
from pathlib import Path

NET = Path(__file__).parent / "networks" / "youth62.json"


def drive(call):
    network = json.loads(NET.read_text())
    sid = call("POST", "/sessions", {
        "network": network,
        "config": {"K": 4, "T": 3, "L": 2, "planner": "heal",
                   "planner_params": {"delta": 4}, "seed": 62},
    })["id"]
    print(f"session {sid} created")

    for _ in range(3):
        rec = call("GET", f"/sessions/{sid}/recommendation")
        action = rec["action"]
        edges = rec["rationale"]["observed_edges"]
        print(f"round {rec['round']}: invite {action}, "
              f"expected spread {rec['rationale']['expected_spread']:.1f}")
        # pretend everyone attended and every suspected tie turned out real
        out = call("POST", f"/sessions/{sid}/observation", {
            "edges": {str(e): 1 for e in edges},
            "attended": action,
        })
        print(f"  -> status {out['status']}, estimate {out['spread_estimate']:.1f}")

    state = call("GET", f"/sessions/{sid}")
    print(f"finished: status={state['status']}, "
          f"{len(state['history'])} rounds logged")


def in_process_call():
    from fastapi.testclient import TestClient

    from dimeplan.service import create_app

    client = TestClient(create_app())

    def call(method, path, body=None):
        r = client.request(method, path, json=body)
        r.raise_for_status()
        return r.json()

    return call


def http_call(base):
    import httpx

    def call(method, path, body=None):
        r = httpx.request(method, base + path, json=body, timeout=120)
        r.raise_for_status()
        return r.json()

    return call


if __name__ == "__main__":
    if len(sys.argv) > 1:
        drive(http_call(sys.argv[1].rstrip("/")))
    else:
        drive(in_process_call())
