"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to watch the lines as they
come; the whole module is also part of the default suite.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from dimeplan.diffusion import stream
from dimeplan.harness import (
    find_adasub_counterexample,
    fixed_policy_spread_mc,
    make_planner,
    run_episode,
    run_experiment,
    verify_adasub_witness,
)
from dimeplan.netcore import (
    UncertainNetwork,
    generate_community,
    generate_two_level,
)
from dimeplan.pomdp import Action
from dimeplan.psinet import InstanceVote, removal_weight, vote_copeland
from dimeplan.timing import PlanningTimeout

from oracles import (
    brute_force_copeland,
    exact_policy_spread,
    repeated_cascade_on_draws,
    single_chance_cascade_on_draws,
)

pytestmark = pytest.mark.acceptance


def report(criterion: int, passed: bool, detail: str) -> None:
    print(f"\n[criterion {criterion}] {'PASS' if passed else 'FAIL'}: {detail}")


# -- criterion 1: Monte Carlo agrees with exhaustive enumeration --------------------


def _tiny_net(seed: int) -> UncertainNetwork:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 6))
    certain, uncertain = [], []
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    rng.shuffle(pairs)
    for (i, j) in pairs:
        if len(certain) + len(uncertain) >= 6:
            break
        r = rng.random()
        if r < 0.3:
            certain.append((i, j, float(rng.uniform(0.2, 0.9))))
        elif r < 0.5 and len(uncertain) < 3:
            uncertain.append(
                (i, j, float(rng.uniform(0.2, 0.9)), float(rng.uniform(0.2, 0.8)))
            )
    return UncertainNetwork(n, certain, uncertain, name=f"tiny-{seed}")


def test_criterion_1_oracle_equivalence():
    t0 = time.time()
    nets = [_tiny_net(s) for s in range(6)]
    nets.append(UncertainNetwork(3, [(0, 1, 0.5)], [(1, 2, 0.7, 0.6)], name="chain"))
    nets.append(
        UncertainNetwork(
            5,
            [(0, 1, 0.8), (1, 2, 0.4)],
            [(2, 3, 0.6, 0.5), (0, 4, 0.3, 0.35)],
            name="mixed5",
        )
    )
    worst = 0.0
    checked = 0
    for idx, net in enumerate(nets):
        for t_rounds, steps in ((1, 1), (1, 2), (2, 1), (2, 2)):
            policy = [[t % net.n] for t in range(t_rounds)]
            exact = exact_policy_spread(net, policy, steps)
            mean, se = fixed_policy_spread_mc(
                net, policy, steps, 100_000, stream(1000 + idx, t_rounds, steps)
            )
            err = abs(mean - exact)
            worst = max(worst, err)
            assert err <= max(3 * se, 1e-12), (net.name, t_rounds, steps, mean, exact)
            assert err <= 0.05
            checked += 1
    elapsed = time.time() - t0
    ok = elapsed < 120
    report(
        1,
        ok,
        f"{checked} policy/net combos, worst |MC - exact| = {worst:.4f} "
        f"(<= 0.05 and 3 SE), {elapsed:.0f}s",
    )
    assert ok


# -- criterion 2: PSINET-W beats DC on community networks ---------------------------


def crit2_network(seed: int) -> UncertainNetwork:
    return generate_community(
        30, 6, 0.5, 0.01, uncertain_frac=0.4,
        p_range=(0.15, 0.4), u_range=(0.2, 0.8), seed=seed,
    )


@pytest.mark.slow
def test_criterion_2_psinet_w_beats_dc():
    t0 = time.time()
    k, t_rounds, steps, episodes = 2, 3, 3, 50
    psinet = make_planner("psinet_w", {"delta": 16, "eta": 256, "pool": 20})
    dc = make_planner("dc")
    psinet_spreads, dc_spreads = [], []
    for net_seed in range(100, 108):
        net = crit2_network(net_seed)
        for ep in range(episodes):
            seed = (net_seed, ep)
            psinet_spreads.append(
                run_episode(net, psinet, k, t_rounds, steps, seed=seed,
                            n_particles=256, planner_name="psinet_w").final_spread
            )
            dc_spreads.append(
                run_episode(net, dc, k, t_rounds, steps, seed=seed,
                            n_particles=256, planner_name="dc").final_spread
            )
    psinet_mean = float(np.mean(psinet_spreads))
    dc_mean = float(np.mean(dc_spreads))
    improvement = psinet_mean / dc_mean - 1.0
    t_stat, p_value = stats.ttest_ind(
        psinet_spreads, dc_spreads, equal_var=False, alternative="greater"
    )
    elapsed = time.time() - t0
    ok = p_value < 0.05 and improvement >= 0.15 and elapsed < 900
    report(
        2,
        ok,
        f"PSINET-W {psinet_mean:.2f} vs DC {dc_mean:.2f} over 8x{episodes} episodes: "
        f"+{improvement * 100:.1f}% (>= 15%), one-sided p = {p_value:.2e} (< 0.05), "
        f"{elapsed:.0f}s",
    )
    assert ok


# -- criteria 3 and 4: scale-up and HEAL vs HEAL-T ----------------------------------


def scale_network() -> UncertainNetwork:
    return generate_two_level(
        150, communities=2, uncertain_frac=0.45,
        p_range=(0.04, 0.16), u_range=(0.2, 0.8), seed=151,
    )


HEAL_PARAMS = {"delta": 8, "rollout_reps": 2}
SCALE_T, SCALE_L = 5, 2
BUDGET_S = 60.0


@pytest.fixture(scope="module")
def heal_vs_others_at_k4():
    """50 paired episodes of HEAL, HEAL-T and DC at K=4 on the scale network."""
    net = scale_network()
    spreads = {"heal": [], "heal_t": [], "dc": []}
    times = {"heal": [], "heal_t": [], "dc": []}
    for name in spreads:
        planner = make_planner(name, HEAL_PARAMS if name != "dc" else {})
        for ep in range(50):
            rec = run_episode(
                net, planner, 4, SCALE_T, SCALE_L, seed=(41, ep),
                n_particles=256, time_budget=BUDGET_S, planner_name=name,
            )
            spreads[name].append(rec.final_spread)
            times[name].extend(r.plan_seconds for r in rec.rounds)
    return spreads, times


@pytest.mark.slow
def test_criterion_3_scale_up(heal_vs_others_at_k4):
    t0 = time.time()
    net = scale_network()
    spreads, times = heal_vs_others_at_k4

    # HEAL completes every round at every K within the budget
    heal_max_times = {4: max(times["heal"])}
    for k in (2, 6):
        planner = make_planner("heal", HEAL_PARAMS)
        rec = run_episode(
            net, planner, k, SCALE_T, SCALE_L, seed=(42, k),
            n_particles=256, time_budget=BUDGET_S, planner_name="heal",
        )
        heal_max_times[k] = max(r.plan_seconds for r in rec.rounds)
    heal_ok = all(t < BUDGET_S for t in heal_max_times.values())

    # full-fidelity PSINET-W must blow the same budget at K >= 4
    dnf = {}
    for k in (2, 4, 6):
        planner = make_planner("psinet_w", {"delta": 64, "eta": 256, "pool": 500})
        try:
            run_episode(
                net, planner, k, SCALE_T, SCALE_L, seed=(43, k),
                n_particles=256, time_budget=BUDGET_S, planner_name="psinet_w",
            )
            dnf[k] = False
        except PlanningTimeout:
            dnf[k] = True
    psinet_dnf_ok = dnf[4] and dnf[6]

    heal_mean = float(np.mean(spreads["heal"]))
    dc_mean = float(np.mean(spreads["dc"]))
    improvement = heal_mean / dc_mean - 1.0
    spread_ok = improvement >= 0.15
    elapsed = time.time() - t0
    ok = heal_ok and psinet_dnf_ok and spread_ok and elapsed < 1800
    report(
        3,
        ok,
        f"HEAL max round time {max(heal_max_times.values()):.1f}s over K={{2,4,6}} "
        f"(< {BUDGET_S:.0f}s); PSINET-W M=500 DNF at K=4: {dnf[4]}, K=6: {dnf[6]} "
        f"(K=2 DNF: {dnf[2]}, unasserted); HEAL {heal_mean:.1f} vs DC {dc_mean:.1f} "
        f"at K=4: +{improvement * 100:.1f}% (>= 15%), {elapsed:.0f}s",
    )
    assert ok


@pytest.mark.slow
def test_criterion_4_heal_vs_heal_t(heal_vs_others_at_k4):
    spreads, _ = heal_vs_others_at_k4
    heal_mean = float(np.mean(spreads["heal"]))
    heal_t_mean = float(np.mean(spreads["heal_t"]))
    gap = heal_mean / heal_t_mean - 1.0
    ok = heal_mean >= heal_t_mean
    report(
        4,
        ok,
        f"HEAL {heal_mean:.1f} >= HEAL-T {heal_t_mean:.1f} over 50 episodes at K=4 "
        f"(relative gap +{gap * 100:.1f}%)",
    )
    assert ok


# -- criterion 5: constructive non-adaptive-submodularity ---------------------------


def test_criterion_5_counterexample():
    t0 = time.time()
    witness = find_adasub_counterexample(10_000, stream(2024, 0))
    elapsed = time.time() - t0
    found = witness is not None
    verified = found and verify_adasub_witness(witness)
    ok = found and verified and elapsed < 300
    detail = "no witness within budget"
    if found:
        detail = (
            f"witness on {witness.network.n} nodes: marginal "
            f"{witness.marginal_base:.4f} -> {witness.marginal_extended:.4f} "
            f"under the longer history; independent verifier agrees: {verified}; "
            f"{elapsed:.0f}s"
        )
    report(5, ok, detail)
    assert ok


# -- criterion 6: voting correctness -------------------------------------------------


def test_criterion_6_voting():
    rng = np.random.default_rng(66)
    actions = [Action([v]) for v in range(5)]
    mismatches = 0
    for _ in range(10_000):
        n_c = int(rng.integers(2, 6))
        n_v = int(rng.integers(1, 8))
        cands = actions[:n_c]
        profile = []
        for _ in range(n_v):
            order = list(cands)
            rng.shuffle(order)
            profile.append(tuple(order))
        votes = [InstanceVote(0, r, 0.0) for r in profile]
        if vote_copeland(votes) != brute_force_copeland(profile):
            mismatches += 1
    weights_exact = all(
        removal_weight(n, m) == math.comb(n, m) / 2 ** n
        for n in range(0, 21)
        for m in range(n + 1)
    )
    ok = mismatches == 0 and weights_exact
    report(
        6,
        ok,
        f"Copeland matches brute force on 10000 random profiles "
        f"({mismatches} mismatches); binomial weights exact for |E_u| <= 20: "
        f"{weights_exact}",
    )
    assert ok


# -- criterion 7: diffusion property suite -------------------------------------------


def _random_case(rng):
    n = int(rng.integers(4, 10))
    certain, uncertain = [], []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            r = rng.random()
            if r < 0.18:
                certain.append((i, j, float(rng.uniform(0.1, 0.9))))
            elif r < 0.28:
                uncertain.append(
                    (i, j, float(rng.uniform(0.1, 0.9)), float(rng.uniform(0.2, 0.8)))
                )
    net = UncertainNetwork(n, certain, uncertain)
    kept = rng.random(net.n_uncertain) < 0.5
    edges = [(e.src, e.dst, e.p, True) for e in net.certain_edges]
    for i, e in enumerate(net.uncertain_edges):
        edges.append((e.src, e.dst, e.p, bool(kept[i])))
    return net, edges


def test_criterion_7_diffusion_properties():
    t0 = time.time()
    rng = np.random.default_rng(7)
    failures = 0
    cases = 0

    for trial in range(800):
        net, edges = _random_case(rng)
        n = net.n
        steps = int(rng.integers(2, 5))
        draws = [rng.random(net.m) for _ in range(steps)]
        seeds_small = {int(rng.integers(n))}
        seeds_big = seeds_small | {int(v) for v in rng.choice(n, size=2)}

        small = repeated_cascade_on_draws(n, edges, seeds_small, draws)
        big = repeated_cascade_on_draws(n, edges, seeds_big, draws)
        shorter = repeated_cascade_on_draws(n, edges, seeds_small, draws[:-1])
        single = single_chance_cascade_on_draws(n, edges, seeds_small, draws)
        bumped = [(s, d, min(1.0, p + 0.15), live) for s, d, p, live in edges]
        more_p = repeated_cascade_on_draws(n, bumped, seeds_small, draws)
        all_live = [(s, d, p, True) for s, d, p, _ in edges]
        more_e = repeated_cascade_on_draws(n, all_live, seeds_small, draws)

        failures += not small <= big
        failures += not shorter <= small
        failures += not single <= small
        failures += not small <= more_p
        failures += not small <= more_e
        cases += 5

    # reward telescoping over full episodes
    for trial in range(200):
        net, _ = _random_case(rng)
        k = 1 if net.n < 6 else 2
        rec = run_episode(
            net, make_planner("random"), k, 3, 2, seed=(777, trial), n_particles=16,
            planner_name="random",
        )
        increments = []
        prev = 0
        for r in rec.rounds:
            increments.append(r.spread_after - prev)
            prev = r.spread_after
        failures += sum(increments) != rec.final_spread
        cases += 1

    elapsed = time.time() - t0
    ok = failures == 0 and cases >= 1000
    report(
        7,
        ok,
        f"{cases} randomized coupled/telescoping checks, {failures} failures, "
        f"{elapsed:.0f}s",
    )
    assert ok


# -- criterion 8: byte-identical experiment reruns -----------------------------------


def test_criterion_8_determinism(tmp_path):
    cfg = {
        "experiment": {
            "K": 2, "T": 3, "L": 2, "episodes": 3, "seeds": [11, 12],
            "particles": 128,
        },
        "network": [
            {"kind": "community", "n": 24, "blocks": 4, "p_in": 0.4, "p_out": 0.02,
             "uncertain_frac": 0.4, "seed": 8, "name": "c24"},
            {"kind": "er", "n": 18, "edge_p": 0.15, "uncertain_frac": 0.5,
             "seed": 9, "name": "er18"},
        ],
        "planner": [
            {"name": "dc"},
            {"name": "heal", "delta": 4, "rollout_reps": 2},
            {"name": "psinet_w", "delta": 4, "eta": 32, "pool": 8},
        ],
    }
    run_experiment(cfg, tmp_path / "run1")
    run_experiment(cfg, tmp_path / "run2")
    a = (tmp_path / "run1" / "results.csv").read_bytes()
    b = (tmp_path / "run2" / "results.csv").read_bytes()
    ok = a == b and len(a) > 0
    report(
        8,
        ok,
        f"two runs of the same config produced byte-identical results.csv "
        f"({len(a)} bytes)",
    )
    assert ok
