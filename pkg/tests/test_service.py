import pytest
from fastapi.testclient import TestClient

from dimeplan.netcore import generate_community, network_to_dict
from dimeplan.service import create_app


@pytest.fixture
def net62():
    return generate_community(
        62, 3, 0.18, 0.02, uncertain_frac=0.35, p_range=(0.2, 0.6),
        u_range=(0.3, 0.8), seed=62,
    )


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=tmp_path / "sessions")
    with TestClient(app) as c:
        yield c


def make_session(client, net, planner="dc", K=4, T=3, L=2, seed=17, **extra):
    payload = {
        "network": network_to_dict(net),
        "config": {"K": K, "T": T, "L": L, "planner": planner, "seed": seed, **extra},
    }
    r = client.post("/sessions", json=payload)
    assert r.status_code == 201, r.text
    return r.json()["id"]


def play_round(client, sid, attended=None, bit=1):
    r = client.get(f"/sessions/{sid}/recommendation")
    assert r.status_code == 200, r.text
    body = r.json()
    edges = body["rationale"]["observed_edges"]
    obs = {"edges": {str(e): bit for e in edges}}
    if attended is not None:
        obs["attended"] = attended
    r2 = client.post(f"/sessions/{sid}/observation", json=obs)
    assert r2.status_code == 200, r2.text
    return body, r2.json()


def test_create_and_session_lifecycle(client, net62):
    sid = make_session(client, net62)
    state = client.get(f"/sessions/{sid}").json()
    assert state["status"] == "awaiting_recommendation"
    assert state["round"] == 1
    assert state["history"] == []
    assert state["network"]["n_nodes"] == 62

    for expected_round in (1, 2, 3):
        rec, after = play_round(client, sid)
        assert rec["round"] == expected_round
        assert len(rec["action"]) == 4
    assert after["status"] == "complete"
    state = client.get(f"/sessions/{sid}").json()
    assert state["status"] == "complete"
    assert len(state["history"]) == 3


def test_recommendation_idempotent_and_unchosen(client, net62):
    sid = make_session(client, net62)
    r1 = client.get(f"/sessions/{sid}/recommendation").json()
    r2 = client.get(f"/sessions/{sid}/recommendation").json()
    assert r1["action"] == r2["action"]
    first_round = set(r1["action"])

    obs = {"edges": {str(e): 0 for e in r1["rationale"]["observed_edges"]}}
    client.post(f"/sessions/{sid}/observation", json=obs)
    r3 = client.get(f"/sessions/{sid}/recommendation").json()
    assert not first_round & set(r3["action"])


def test_complete_session_conflicts(client, net62):
    sid = make_session(client, net62, T=1)
    play_round(client, sid)
    assert client.get(f"/sessions/{sid}/recommendation").status_code == 409
    r = client.post(f"/sessions/{sid}/observation", json={"edges": {}})
    assert r.status_code == 409


def test_observation_requires_pending_recommendation(client, net62):
    sid = make_session(client, net62)
    r = client.post(f"/sessions/{sid}/observation", json={"edges": {}})
    assert r.status_code == 409


def test_observation_bits_must_cover_theta(client, net62):
    sid = make_session(client, net62)
    rec = client.get(f"/sessions/{sid}/recommendation").json()
    edges = rec["rationale"]["observed_edges"]
    if edges:
        missing = {"edges": {str(e): 1 for e in edges[:-1]}}
        assert client.post(f"/sessions/{sid}/observation", json=missing).status_code == 400
    extra = {"edges": {str(e): 1 for e in edges + [10**6]}}
    assert client.post(f"/sessions/{sid}/observation", json=extra).status_code == 400


def test_attended_must_be_subset(client, net62):
    sid = make_session(client, net62)
    rec = client.get(f"/sessions/{sid}/recommendation").json()
    obs = {
        "edges": {str(e): 0 for e in rec["rationale"]["observed_edges"]},
        "attended": [999],
    }
    assert client.post(f"/sessions/{sid}/observation", json=obs).status_code == 400


def test_partial_attendance_keeps_no_shows_eligible(client, net62):
    sid = make_session(client, net62)
    rec, after = play_round(client, sid, attended=None)
    action = rec["action"]

    sid2 = make_session(client, net62, seed=17)
    rec2 = client.get(f"/sessions/{sid2}/recommendation").json()
    assert rec2["action"] == action  # same seed, same recommendation
    obs = {
        "edges": {str(e): 1 for e in rec2["rationale"]["observed_edges"]},
        "attended": action[:2],
    }
    client.post(f"/sessions/{sid2}/observation", json=obs)
    state = client.get(f"/sessions/{sid2}").json()
    assert state["chosen_nodes"] == sorted(action[:2])  # no-shows stay eligible


def test_validation_rejects_bad_networks_and_config(client, net62):
    doc = network_to_dict(net62)
    r = client.post("/sessions", json={"network": doc, "config": {"K": 100, "T": 1, "L": 1}})
    assert r.status_code == 422

    dup = network_to_dict(net62)
    dup["certain_edges"].append(dict(dup["certain_edges"][0]))
    r = client.post("/sessions", json={"network": dup, "config": {"K": 2, "T": 1, "L": 1}})
    assert r.status_code == 422
    assert "duplicate" in r.json()["detail"]

    r = client.post("/sessions", json={"network": doc, "config": {"K": 2, "T": 1, "L": 1, "planner": "nope"}})
    assert r.status_code == 422


def test_unknown_session_404(client):
    assert client.get("/sessions/deadbeef").status_code == 404


def test_observed_edges_annotated_and_append_only(client, net62):
    sid = make_session(client, net62)
    rec, _ = play_round(client, sid, bit=1)
    state = client.get(f"/sessions/{sid}").json()
    observed = {
        e["id"]: e["observed"]
        for e in state["network"]["uncertain_edges"]
        if e["observed"] is not None
    }
    assert set(observed) == set(rec["rationale"]["observed_edges"])
    assert all(bit == 1 for bit in observed.values())

    # re-observing with a contradictory bit is refused
    rec2 = client.get(f"/sessions/{sid}/recommendation").json()
    overlap = set(rec2["rationale"]["observed_edges"]) & set(observed)
    # even without overlap, posting a contradictory bit for an already-known
    # edge cannot happen through the API: bits must exactly cover theta
    obs = {"edges": {str(e): 0 for e in rec2["rationale"]["observed_edges"]}}
    r = client.post(f"/sessions/{sid}/observation", json=obs)
    if overlap:
        assert r.status_code == 400
    else:
        assert r.status_code == 200


def test_export_is_episode_shaped(client, net62):
    sid = make_session(client, net62, T=2)
    play_round(client, sid)
    play_round(client, sid)
    doc = client.get(f"/sessions/{sid}/export").json()
    assert doc["K"] == 4 and doc["T"] == 2
    assert doc["true_f"] is None  # deployment: ground truth unknown
    assert len(doc["rounds"]) == 2
    for r in doc["rounds"]:
        assert len(r["action"]) == 4
        assert isinstance(r["observation"], list)
    assert doc["ground_truth_isolated"] is True


def test_replay_after_restart(tmp_path, net62):
    data_dir = tmp_path / "store"
    app = create_app(data_dir=data_dir)
    with TestClient(app) as client:
        sid = make_session(client, net62, seed=5)
        rec, _ = play_round(client, sid)
        state_before = client.get(f"/sessions/{sid}").json()

    # a fresh app instance rebuilds the session from its event log
    app2 = create_app(data_dir=data_dir)
    with TestClient(app2) as client2:
        state_after = client2.get(f"/sessions/{sid}").json()
        assert state_after["round"] == state_before["round"]
        assert state_after["status"] == state_before["status"]
        assert state_after["chosen_nodes"] == state_before["chosen_nodes"]
        assert state_after["network"] == state_before["network"]
        # and the next recommendation still works
        nxt = client2.get(f"/sessions/{sid}/recommendation")
        assert nxt.status_code == 200


def test_session_with_heal_planner(client, net62):
    sid = make_session(client, net62, planner="heal", K=3, T=2, L=1,
                       planner_params={"delta": 4})
    rec, after = play_round(client, sid)
    assert len(rec["action"]) == 3
    assert after["round"] == 2
