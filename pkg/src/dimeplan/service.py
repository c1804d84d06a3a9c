"""Session-oriented HTTP facade for running interventions with a human in the loop.

A session wraps one network plus a planner configuration and walks the
operator through T rounds: fetch the round's recommendation, hold the
intervention, report which invitees attended and which of their uncertain
friendships turned out to exist, advance.  Sessions persist as append-only
JSONL event logs; replaying a log reproduces the exact same state because the
planner seed is fixed at creation time.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .diffusion import batch_cascade, stream
from .harness import make_planner, PlannerContext, PLANNER_NAMES
from .netcore import NetworkFormatError, UncertainNetwork, dc_scores, network_from_dict
from .pomdp import (
    Action,
    Belief,
    Observation,
    belief_update,
    initial_belief,
    observed_edge_set,
)

AWAITING_RECOMMENDATION = "awaiting_recommendation"
AWAITING_OBSERVATION = "awaiting_observation"
COMPLETE = "complete"


class SessionConfig(BaseModel):
    K: int = Field(ge=1)
    T: int = Field(ge=1)
    L: int = Field(ge=0)
    planner: str = "heal"
    planner_params: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None
    particles: int = Field(default=256, ge=1)
    # deployment fidelity: only nodes that actually showed up count as influenced
    attendees_only: bool = True


class CreateSessionRequest(BaseModel):
    network: dict[str, Any]
    config: SessionConfig


class ObservationRequest(BaseModel):
    edges: dict[int, int]
    attended: list[int] | None = None


class Session:
    def __init__(self, sid: str, net: UncertainNetwork, config: SessionConfig, seed: int):
        self.id = sid
        self.net = net
        self.config = config
        self.seed = seed
        self.round = 1
        self.status = AWAITING_RECOMMENDATION
        self.belief: Belief = initial_belief(net, config.particles, stream(seed, 1))
        self.cached_action: Action | None = None
        self.cached_rationale: dict | None = None
        self.log: list[dict] = []
        self.lock = threading.Lock()

    def spread_estimate(self) -> float:
        return self.belief.mean_spread()


def _expected_spread_after(session: Session, action: Action) -> float:
    """Belief-side estimate of the influenced count after taking the action."""
    b = session.belief
    net = session.net
    w = b.W.copy()
    w[:, list(action.nodes)] = True
    active = np.concatenate(
        [np.ones((b.n_particles, net.n_certain), dtype=bool), b.F], axis=1
    )
    w = batch_cascade(net, active, w, session.config.L, stream(session.seed, 90, session.round))
    return float(w.sum(axis=1).mean())


def _network_snapshot(session: Session) -> dict:
    net = session.net
    known = session.belief.known_edges
    return {
        "n_nodes": net.n,
        "node_labels": list(net.node_labels) if net.node_labels else None,
        "certain_edges": [
            {"id": e.id, "src": e.src, "dst": e.dst, "p": e.p}
            for e in net.certain_edges
        ],
        "uncertain_edges": [
            {
                "id": e.id,
                "src": e.src,
                "dst": e.dst,
                "p": e.p,
                "u": e.u,
                "observed": known.get(e.id),
            }
            for e in net.uncertain_edges
        ],
    }


def _session_snapshot(session: Session) -> dict:
    cfg = session.config
    rec = None
    if session.cached_action is not None and session.status != COMPLETE:
        rec = list(session.cached_action.nodes)
    return {
        "id": session.id,
        "status": session.status,
        "round": session.round,
        "K": cfg.K,
        "T": cfg.T,
        "L": cfg.L,
        "planner": cfg.planner,
        "network": _network_snapshot(session),
        "history": [e for e in session.log if e["event"] == "observation_applied"],
        "pending_recommendation": rec,
        "chosen_nodes": sorted(session.belief.chosen_nodes()),
        "spread_estimate": session.spread_estimate(),
    }


class SessionStore:
    """In-memory sessions backed by append-only JSONL event logs."""

    def __init__(self, data_dir: str | Path | None = None):
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self._store_lock = threading.Lock()

    def _log_path(self, sid: str) -> Path | None:
        return self.data_dir / f"{sid}.jsonl" if self.data_dir else None

    def append_event(self, session: Session, event: dict) -> None:
        event = dict(event)
        event["ts"] = time.time()
        session.log.append(event)
        path = self._log_path(session.id)
        if path:
            with open(path, "a") as fh:
                fh.write(json.dumps(event) + "\n")

    def create(
        self, net: UncertainNetwork, config: SessionConfig, network_payload: dict
    ) -> Session:
        sid = uuid.uuid4().hex[:12]
        seed = config.seed if config.seed is not None else int.from_bytes(
            uuid.uuid4().bytes[:4], "big"
        )
        session = Session(sid, net, config, seed)
        with self._store_lock:
            self.sessions[sid] = session
        self.append_event(
            session,
            {
                "event": "created",
                "network_full": network_payload,
                "config": config.model_dump(),
                "seed": seed,
            },
        )
        return session

    def get(self, sid: str) -> Session:
        with self._store_lock:
            session = self.sessions.get(sid)
        if session is None:
            session = self._replay(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        return session

    def _replay(self, sid: str) -> Session | None:
        path = self._log_path(sid)
        if not path or not path.exists():
            return None
        events = [json.loads(line) for line in path.read_text().splitlines() if line]
        created = events[0]
        net = network_from_dict(created["network_full"])
        config = SessionConfig(**created["config"])
        session = Session(sid, net, config, int(created["seed"]))
        session.log = []
        for ev in events:
            session.log.append(ev)
            if ev["event"] == "recommendation":
                session.cached_action = Action(ev["action"])
                session.cached_rationale = ev["rationale"]
                session.status = AWAITING_OBSERVATION
            elif ev["event"] == "observation_applied":
                _apply_observation(
                    session,
                    {int(k): int(v) for k, v in ev["edges"].items()},
                    ev["attended"],
                )
        with self._store_lock:
            self.sessions[sid] = session
        return session


def _apply_observation(session: Session, edge_bits: dict[int, int], attended: list[int]) -> None:
    """Advance belief and status; assumes inputs already validated."""
    action = session.cached_action
    obs = Observation(tuple(edge_bits.items()))
    influenced = attended if session.config.attendees_only else list(action.nodes)
    session.belief = belief_update(
        session.belief,
        action,
        obs,
        session.config.L,
        stream(session.seed, 4, session.round),
        influenced=influenced,
    )
    session.cached_action = None
    session.cached_rationale = None
    if session.round >= session.config.T:
        session.status = COMPLETE
    else:
        session.round += 1
        session.status = AWAITING_RECOMMENDATION


def create_app(
    data_dir: str | Path | None = None,
    default_planner: str = "heal",
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="dimeplan session service")
    store = SessionStore(data_dir)
    app.state.store = store

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest) -> dict:
        cfg = req.config
        if cfg.planner == "":
            cfg.planner = default_planner
        if cfg.planner not in PLANNER_NAMES:
            raise HTTPException(422, detail=f"unknown planner {cfg.planner!r}")
        try:
            net = network_from_dict(req.network, name_hint="session")
        except NetworkFormatError as exc:
            raise HTTPException(422, detail=str(exc))
        if cfg.K > net.n:
            raise HTTPException(422, detail=f"K={cfg.K} exceeds the {net.n}-node network")
        if cfg.K * cfg.T > net.n:
            raise HTTPException(
                422, detail=f"K*T={cfg.K * cfg.T} exceeds the {net.n}-node network"
            )
        session = store.create(net, cfg, req.network)
        return {"id": session.id, "status": session.status, "round": session.round}

    @app.get("/sessions/{sid}")
    def get_state(sid: str) -> dict:
        session = store.get(sid)
        with session.lock:
            return _session_snapshot(session)

    @app.get("/sessions/{sid}/recommendation")
    def get_recommendation(sid: str) -> dict:
        session = store.get(sid)
        with session.lock:
            if session.status == COMPLETE:
                raise HTTPException(409, detail="session is complete")
            if session.status == AWAITING_OBSERVATION:
                # idempotent replay of the cached recommendation
                return {
                    "round": session.round,
                    "action": list(session.cached_action.nodes),
                    "rationale": session.cached_rationale,
                    "status": session.status,
                }
            cfg = session.config
            planner = make_planner(cfg.planner, cfg.planner_params)
            ctx = PlannerContext(
                k=cfg.K,
                t_total=cfg.T,
                steps=cfg.L,
                round_index=session.round,
                rng=stream(session.seed, 2, session.round),
            )
            action = planner(session.net, session.belief, ctx)
            scores = dc_scores(session.net)
            rationale = {
                "node_scores": {str(v): float(scores[v]) for v in action.nodes},
                "expected_spread": _expected_spread_after(session, action),
                "observed_edges": list(observed_edge_set(action, session.net)),
            }
            session.cached_action = action
            session.cached_rationale = rationale
            session.status = AWAITING_OBSERVATION
            store.append_event(
                session,
                {
                    "event": "recommendation",
                    "round": session.round,
                    "action": list(action.nodes),
                    "rationale": rationale,
                },
            )
            return {
                "round": session.round,
                "action": list(action.nodes),
                "rationale": rationale,
                "status": session.status,
            }

    @app.post("/sessions/{sid}/observation")
    def submit_observation(sid: str, req: ObservationRequest) -> dict:
        session = store.get(sid)
        with session.lock:
            if session.status != AWAITING_OBSERVATION:
                raise HTTPException(
                    409, detail=f"no pending recommendation (status {session.status})"
                )
            action = session.cached_action
            expected = observed_edge_set(action, session.net)
            got = tuple(sorted(req.edges))
            if got != expected:
                raise HTTPException(
                    400,
                    detail=f"observation must cover edges {list(expected)}, got {list(got)}",
                )
            for eid, bit in req.edges.items():
                if bit not in (0, 1):
                    raise HTTPException(400, detail=f"edge {eid}: bit must be 0 or 1")
                old = session.belief.known_edges.get(eid)
                if old is not None and old != bit:
                    raise HTTPException(
                        400, detail=f"edge {eid} was already observed as {old}"
                    )
            attended = req.attended
            if attended is None:
                attended = list(action.nodes)
            bad = [v for v in attended if v not in action.nodes]
            if bad:
                raise HTTPException(
                    400, detail=f"attended nodes {bad} are not part of the action"
                )
            attended = sorted(set(attended))
            round_index = session.round
            _apply_observation(session, dict(req.edges), attended)
            store.append_event(
                session,
                {
                    "event": "observation_applied",
                    "round": round_index,
                    "action": list(action.nodes),
                    "edges": {str(k): int(v) for k, v in req.edges.items()},
                    "attended": attended,
                },
            )
            return {
                "status": session.status,
                "round": session.round,
                "spread_estimate": session.spread_estimate(),
            }

    @app.get("/sessions/{sid}/export")
    def export_session(sid: str) -> dict:
        session = store.get(sid)
        with session.lock:
            rounds = []
            for ev in session.log:
                if ev["event"] != "observation_applied":
                    continue
                rounds.append(
                    {
                        "action": ev["action"],
                        "observation": [[int(k), int(v)] for k, v in sorted(
                            ((int(k), v) for k, v in ev["edges"].items())
                        )],
                        "attended": ev["attended"],
                        "spread_after": None,  # hidden in deployment
                        "plan_seconds": None,
                    }
                )
            return {
                "network": session.net.name,
                "planner": session.config.planner,
                "K": session.config.K,
                "T": session.config.T,
                "L": session.config.L,
                "root_seed": [session.seed],
                "true_f": None,
                "rounds": rounds,
                "final_spread": None,
                "spread_estimate": session.spread_estimate(),
                "ground_truth_isolated": True,
            }

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")

    return app


def main(argv=None) -> None:
    """Serve the session API: ``python -m dimeplan.service --port 8000``.

    Flags fall back to DIMEPLAN_HOST / DIMEPLAN_PORT / DIMEPLAN_DATA_DIR /
    DIMEPLAN_PLANNER / DIMEPLAN_STATIC_DIR environment variables.
    """
    import argparse
    import os

    env = os.environ.get
    parser = argparse.ArgumentParser(description="dimeplan session service")
    parser.add_argument("--host", default=env("DIMEPLAN_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(env("DIMEPLAN_PORT", "8000")))
    parser.add_argument("--data-dir", default=env("DIMEPLAN_DATA_DIR"),
                        help="directory for session event logs")
    parser.add_argument("--planner", default=env("DIMEPLAN_PLANNER", "heal"),
                        help="default planner")
    parser.add_argument("--static-dir", default=env("DIMEPLAN_STATIC_DIR"),
                        help="serve the console bundle from here")
    args = parser.parse_args(argv)

    import uvicorn

    app = create_app(args.data_dir, args.planner, args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
