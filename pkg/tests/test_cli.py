import json
import subprocess

import pytest

from dimeplan.cli import diffuse_main, dime_main, net_main, plan_main
from dimeplan.netcore import load_network, save_network


@pytest.fixture
def net_file(tmp_path, demo6):
    path = tmp_path / "demo6.json"
    save_network(demo6, path)
    return str(path)


def test_net_gen_partition_stats(tmp_path, capsys):
    out = str(tmp_path / "er.json")
    assert net_main([
        "gen", "er", "--n", "24", "--edge-p", "0.15", "--uncertain-frac", "0.4",
        "--seed", "3", "-o", out,
    ]) == 0
    net = load_network(out)
    assert net.n == 24

    assert net_main(["partition", "--net", out, "--k", "3"]) == 0
    captured = capsys.readouterr().out
    assert "cut_weight" in captured and "part_sizes" in captured

    assert net_main(["stats", "--net", out]) == 0
    captured = capsys.readouterr().out
    assert "nodes 24" in captured
    assert f"uncertain_edges {net.n_uncertain}" in captured


def test_net_gen_ws_and_community(tmp_path):
    ws = str(tmp_path / "ws.json")
    net_main(["gen", "ws", "--n", "12", "--k-ring", "4", "--rewire-p", "0.2", "-o", ws])
    assert load_network(ws).m == 48
    cm = str(tmp_path / "cm.json")
    net_main([
        "gen", "community", "--n", "20", "--blocks", "2", "--p-in", "0.3",
        "--p-out", "0.02", "-o", cm,
    ])
    assert load_network(cm).n == 20


def test_diffuse_cli(net_file, tmp_path, capsys):
    csv_path = str(tmp_path / "rounds.csv")
    assert diffuse_main([
        "--net", net_file, "--seeds", "0,1", "--L", "2", "--sims", "500",
        "--seed", "5", "--per-round-csv", csv_path,
    ]) == 0
    out = capsys.readouterr().out
    assert "spread" in out
    lines = open(csv_path).read().splitlines()
    assert lines[0] == "round,mean,stderr"
    assert len(lines) == 3


def test_plan_psinet_cli(net_file, tmp_path, capsys):
    votes = str(tmp_path / "votes.csv")
    assert plan_main([
        "psinet", "--variant", "w", "--delta", "4", "--eta", "16", "--M", "6",
        "--net", net_file, "--K", "2", "--T", "2", "--L", "1", "--seed", "3",
        "--votes-csv", votes,
    ]) == 0
    out = capsys.readouterr().out
    assert out.startswith("action ")
    rows = open(votes).read().splitlines()
    assert rows[0] == "instance,removed_edges,best_value,top_action"
    assert len(rows) == 5


def test_plan_heal_cli(net_file, tmp_path, capsys):
    diag = str(tmp_path / "diag.csv")
    assert plan_main([
        "heal", "--variant", "k", "--delta", "4", "--net", net_file,
        "--K", "2", "--T", "3", "--L", "1", "--seed", "4",
        "--diagnostics-csv", diag,
    ]) == 0
    out = capsys.readouterr().out
    action = out.splitlines()[0].split()[1].split(",")
    assert len(action) == 2
    assert "partition_sizes" in out and "cut_weight" in out
    rows = open(diag).read().splitlines()
    assert rows[0].startswith("part,size,eligible,budget")
    assert len(rows) > 1
    assert sum(1 for r in rows[1:] if r.endswith(",1")) == 2  # one pick per part


def test_plan_with_belief_file(net_file, tmp_path, capsys, demo6):
    from dimeplan.diffusion import stream
    from dimeplan.pomdp import (
        Action,
        Observation,
        belief_update,
        initial_belief,
        save_belief,
    )

    b = initial_belief(demo6, 64, stream(9, 0))
    b = belief_update(b, Action([1, 2]), Observation([(4, 0), (5, 0)]), 1, stream(9, 1))
    bf = str(tmp_path / "belief.json")
    save_belief(b, 9, bf)
    assert plan_main([
        "heal", "--net", net_file, "--belief", bf, "--K", "2", "--T", "3",
        "--round", "2", "--L", "1", "--seed", "4",
    ]) == 0
    action = capsys.readouterr().out.split()[1].split(",")
    assert not {"1", "2"} & set(action)  # already-chosen nodes excluded


def test_dime_episode_and_record(net_file, tmp_path, capsys):
    rec_path = str(tmp_path / "ep.json")
    assert dime_main([
        "episode", "--planner", "dc", "--net", net_file, "--K", "2", "--T", "2",
        "--L", "1", "--seed", "2", "--out", rec_path,
    ]) == 0
    out = capsys.readouterr().out
    assert "final_spread" in out
    doc = json.loads(open(rec_path).read())
    assert doc["planner"] == "dc"
    assert len(doc["rounds"]) == 2


def test_dime_counterexample(capsys):
    assert dime_main(["counterexample", "--budget", "5000", "--seed", "2"]) == 0
    out = capsys.readouterr().out
    assert "witness found and verified" in out
    assert "marginal gain" in out


def test_dime_run(tmp_path, capsys):
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        """
[experiment]
K = 2
T = 2
L = 1
episodes = 2
seeds = [1]
particles = 32

[[network]]
kind = "er"
n = 10
edge_p = 0.2
uncertain_frac = 0.3
seed = 3
name = "er10"

[[planner]]
name = "dc"

[[planner]]
name = "random"
"""
    )
    out_dir = tmp_path / "out"
    assert dime_main(["run", "--config", str(cfg), "--out", str(out_dir)]) == 0
    printed = capsys.readouterr().out
    assert "planner network seed" in printed
    assert (out_dir / "results.csv").exists()


def test_console_scripts_installed():
    for cmd in ("net", "diffuse", "plan", "dime"):
        proc = subprocess.run(
            [cmd, "--help"], capture_output=True, text=True, timeout=60
        )
        assert proc.returncode == 0, proc.stderr
