"""HEAL: hierarchical ensemble planning via graph partitioning and TASP.

The top layer splits the observation-updated network into nearly disconnected
partitions, each treated as its own planning problem.  The bottom layer
(TASP) resolves a partition's remaining uncertainty by sampling instantiated
subnetworks, scores every action on every instance (alpha lists), combines
the scores with normalized instance probabilities and returns the argmax.

Two variants: the K-partition form picks one node from each of K partitions
every round; the T-partition form spends the whole per-round budget inside
partition i during round i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diffusion import batch_cascade, rng_from
from .netcore import (
    InstantiatedNetwork,
    UncertainNetwork,
    apply_observations,
    dc_scores,
    induced_subnetwork,
    instance_probability,
    partition,
    sample_instance,
)
from .pomdp import Action, Belief
from .timing import Deadline, check


@dataclass(frozen=True)
class IntermediatePomdp:
    """One partition's planning problem: induced subnetwork plus node budget."""

    subnetwork: UncertainNetwork
    nodes: np.ndarray  # global node ids; local index i is nodes[i]
    budget: int

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.subnetwork.n < self.budget:
            raise ValueError(
                f"partition of {self.subnetwork.n} nodes cannot supply "
                f"budget {self.budget}"
            )


@dataclass(frozen=True)
class AlphaList:
    """Long-term reward per action on one instantiated subnetwork."""

    instance_index: int
    values: np.ndarray  # aligned with the shared action list


def _build_parts(net, b, n_parts, budget, imbalance_tolerance, seed):
    resolved = apply_observations(net, b.known_edges)
    parting = partition(resolved, n_parts, imbalance_tolerance, seed=seed)
    ipomdps = []
    for i in range(n_parts):
        sub, nodes = induced_subnetwork(resolved, parting.part_nodes(i))
        ipomdps.append(IntermediatePomdp(subnetwork=sub, nodes=nodes, budget=budget))
    return resolved, parting, ipomdps


def build_intermediate_pomdps(
    net: UncertainNetwork,
    b: Belief,
    n_parts: int,
    mode: str = "K_parts",
    budget: int | None = None,
    imbalance_tolerance: float = 0.1,
    seed: int = 0,
) -> list[IntermediatePomdp]:
    """Partition the observation-updated network and induce one POMDP per part.

    Observed-present uncertain edges enter the partitioning view as certain
    edges, observed-absent ones disappear entirely; cross-partition edges are
    dropped.
    """
    if mode not in ("K_parts", "T_parts"):
        raise ValueError("mode must be K_parts or T_parts")
    if budget is None:
        budget = 1
    _, _, ipomdps = _build_parts(net, b, n_parts, budget, imbalance_tolerance, seed)
    return ipomdps


def _greedy_pick(
    net: UncertainNetwork,
    active: np.ndarray,
    w_row: np.ndarray,
    steps: int,
    rng,
) -> int | None:
    """Single Monte Carlo greedy choice: the un-influenced node whose addition
    gives the largest simulated spread.  Returns a local node id or None when
    everything is already influenced."""
    cand = np.flatnonzero(~w_row)
    if cand.size == 0:
        return None
    if cand.size == 1:
        return int(cand[0])
    w = np.broadcast_to(w_row, (cand.size, net.n)).copy()
    w[np.arange(cand.size), cand] = True
    w = batch_cascade(net, active, w, steps, rng)
    totals = w.sum(axis=1)
    best = np.flatnonzero(totals == totals.max())
    return int(cand[best[0]])


def alpha_list(
    inst: InstantiatedNetwork,
    actions: Sequence[Action],
    horizon: int,
    steps: int,
    rollout_reps: int,
    rng,
    w0: np.ndarray | None = None,
    instance_index: int = 0,
    deadline: Deadline | None = None,
) -> AlphaList:
    """Estimate each action's long-term reward on a fully resolved instance.

    Rollouts take the action, cascade, then follow a greedy policy: each later
    step adds the node with the best Monte Carlo marginal spread.  Rewards are
    newly influenced counts relative to the starting vector, averaged over
    ``rollout_reps`` rollouts per action.
    """
    if rollout_reps < 1:
        raise ValueError("rollout_reps must be >= 1")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    net = inst.base
    rng = rng_from(rng)
    active = inst.active_mask()
    if w0 is None:
        w0 = np.zeros(net.n, dtype=bool)
    base_count = int(w0.sum())

    n_a = len(actions)
    rows = n_a * rollout_reps
    w = np.broadcast_to(w0, (rows, net.n)).copy()
    first = np.repeat(
        np.array([a.nodes for a in actions], dtype=np.int64), rollout_reps, axis=0
    )
    w[np.arange(rows)[:, None], first] = True
    w = batch_cascade(net, active, w, steps, rng)

    budget = len(actions[0])
    for _ in range(horizon - 1):
        check(deadline)
        if w.all():
            break
        for r in range(rows):
            for _ in range(budget):
                pick = _greedy_pick(net, active, w[r], steps, rng)
                if pick is None:
                    break
                w[r, pick] = True
        w = batch_cascade(net, active, w, steps, rng)

    values = (w.sum(axis=1) - base_count).reshape(n_a, rollout_reps).mean(axis=1)
    return AlphaList(instance_index=instance_index, values=values.astype(np.float64))


def tasp_expected_rewards(
    ipomdp: IntermediatePomdp,
    w_particles: np.ndarray | None,
    delta: int | str,
    actions: Sequence[Action],
    horizon: int,
    steps: int,
    rng,
    rollout_reps: int = 4,
    deadline: Deadline | None = None,
) -> np.ndarray:
    """Probability-weighted expected reward per action across sampled instances.

    ``delta`` is the instance count, or ``"exhaustive"`` to enumerate every
    existence vector (requires few enough uncertain edges).  Instance weights
    are existence-probability products normalized over the drawn set.
    """
    if not actions:
        raise ValueError("actions must be non-empty")
    net = ipomdp.subnetwork
    rng = rng_from(rng)

    if delta == "exhaustive":
        if net.n_uncertain > 16:
            raise ValueError("exhaustive mode needs <= 16 uncertain edges")
        kept_vectors = [
            np.array(
                [(mask >> i) & 1 for i in range(net.n_uncertain)], dtype=bool
            )
            for mask in range(2 ** net.n_uncertain)
        ]
        instances = [InstantiatedNetwork(net, kv) for kv in kept_vectors]
    else:
        if delta < 1:
            raise ValueError("delta must be >= 1")
        instances = [sample_instance(net, rng) for _ in range(delta)]

    probs = np.array([instance_probability(net, inst.kept) for inst in instances])
    total = probs.sum()
    weights = probs / total if total > 0 else np.full(len(instances), 1.0 / len(instances))

    expected = np.zeros(len(actions), dtype=np.float64)
    child_rngs = rng.spawn(len(instances))
    for i, (inst, child) in enumerate(zip(instances, child_rngs)):
        check(deadline)
        if w_particles is None:
            w0 = None
        else:
            w0 = w_particles[int(child.integers(w_particles.shape[0]))]
        alpha = alpha_list(
            inst,
            actions,
            horizon,
            steps,
            rollout_reps,
            child,
            w0=w0,
            instance_index=i,
            deadline=deadline,
        )
        expected += weights[i] * alpha.values
    return expected


def tasp_solve(
    ipomdp: IntermediatePomdp,
    w_particles: np.ndarray | None,
    delta: int | str,
    actions: Sequence[Action],
    horizon: int,
    steps: int,
    rng,
    rollout_reps: int = 4,
    deadline: Deadline | None = None,
) -> Action:
    """Pick the action with the best expected reward; ties break lexicographically."""
    expected = tasp_expected_rewards(
        ipomdp, w_particles, delta, actions, horizon, steps, rng,
        rollout_reps=rollout_reps, deadline=deadline,
    )
    order = sorted(range(len(actions)), key=lambda j: (-expected[j], actions[j].nodes))
    return actions[order[0]]


def _tasp_pick_nodes(
    ipomdp: IntermediatePomdp,
    b: Belief,
    count: int,
    eligible_local: list[int],
    horizon: int,
    steps: int,
    delta: int | str,
    rng,
    rollout_reps: int,
    deadline: Deadline | None,
    tables: list | None = None,
) -> list[int]:
    """Iterated single-node TASP: greedily pick ``count`` nodes from one part.

    When ``tables`` is given, each iteration appends its (global node id,
    expected reward) table for diagnostics output.
    """
    w_particles = b.W[:, ipomdp.nodes]
    forced: list[int] = []
    remaining = list(eligible_local)
    for _ in range(count):
        if not remaining:
            break
        actions = [Action((v,)) for v in remaining]
        wp = w_particles
        if forced:
            wp = w_particles.copy()
            wp[:, forced] = True
        rewards = tasp_expected_rewards(
            ipomdp,
            wp,
            delta,
            actions,
            horizon,
            steps,
            rng,
            rollout_reps=rollout_reps,
            deadline=deadline,
        )
        order = sorted(
            range(len(actions)), key=lambda j: (-rewards[j], actions[j].nodes)
        )
        if tables is not None:
            tables.append(
                [(int(ipomdp.nodes[a.nodes[0]]), float(r))
                 for a, r in zip(actions, rewards)]
            )
        v = actions[order[0]].nodes[0]
        forced.append(v)
        remaining.remove(v)
    return forced


def heal_plan_detailed(
    net: UncertainNetwork,
    b: Belief,
    k: int,
    t_total: int,
    steps: int,
    round_index: int,
    delta: int | str = 16,
    rng=None,
    rollout_reps: int = 4,
    imbalance_tolerance: float = 0.1,
    deadline: Deadline | None = None,
) -> tuple[Action, dict]:
    """K-partition variant plus per-partition diagnostics.

    Partitions are rebuilt every round from the observation-updated network.
    A partition whose nodes are all spent hands its budget to the partition
    with the most eligible nodes left.  Diagnostics carry partition sizes,
    the cut weight and each partition's expected-reward table.
    """
    from .partitioning import cut_weight

    if not 1 <= round_index <= t_total:
        raise ValueError("round_index must lie in [1, T]")
    if k > net.n:
        raise ValueError("K cannot exceed the node count")
    rng = rng_from(rng)
    part_seed = int(rng.integers(1 << 31))
    resolved, parting, ipomdps = _build_parts(
        net, b, k, 1, imbalance_tolerance, part_seed
    )
    chosen = b.chosen_nodes()
    eligible = [
        [i for i, v in enumerate(ip.nodes) if int(v) not in chosen] for ip in ipomdps
    ]
    total_eligible = sum(len(e) for e in eligible)
    if total_eligible < k:
        raise ValueError(f"only {total_eligible} unchosen nodes remain, need {k}")

    budgets = [1] * k
    # reassign budget away from exhausted or undersized partitions
    for i in range(k):
        while budgets[i] > len(eligible[i]):
            spare = max(
                (j for j in range(k) if len(eligible[j]) > budgets[j]),
                key=lambda j: (len(eligible[j]) - budgets[j], -j),
            )
            budgets[i] -= 1
            budgets[spare] += 1

    horizon = t_total - round_index + 1
    picked_global: list[int] = []
    part_diags: list[dict] = []
    child_rngs = rng.spawn(k)
    for i, (ip, child) in enumerate(zip(ipomdps, child_rngs)):
        if budgets[i] == 0:
            part_diags.append(
                {"part": i, "size": ip.subnetwork.n, "eligible": len(eligible[i]),
                 "budget": 0, "picked": [], "tables": []}
            )
            continue
        check(deadline)
        tables: list = []
        local = _tasp_pick_nodes(
            ip, b, budgets[i], eligible[i], horizon, steps, delta, child,
            rollout_reps, deadline, tables=tables,
        )
        picked = [int(ip.nodes[v]) for v in local]
        picked_global.extend(picked)
        part_diags.append(
            {"part": i, "size": ip.subnetwork.n, "eligible": len(eligible[i]),
             "budget": budgets[i], "picked": picked, "tables": tables}
        )
    diagnostics = {
        "partition_sizes": [int(s) for s in parting.sizes()],
        "cut_weight": cut_weight(resolved, parting.parts),
        "parts": part_diags,
    }
    return Action(picked_global), diagnostics


def heal_plan(
    net: UncertainNetwork,
    b: Belief,
    k: int,
    t_total: int,
    steps: int,
    round_index: int,
    delta: int | str = 16,
    rng=None,
    rollout_reps: int = 4,
    imbalance_tolerance: float = 0.1,
    deadline: Deadline | None = None,
) -> Action:
    """K-partition variant: one TASP-chosen node from each of K partitions."""
    action, _ = heal_plan_detailed(
        net, b, k, t_total, steps, round_index, delta, rng,
        rollout_reps, imbalance_tolerance, deadline,
    )
    return action


def heal_t_plan_detailed(
    net: UncertainNetwork,
    b: Belief,
    k: int,
    t_total: int,
    steps: int,
    round_index: int,
    delta: int | str = 16,
    rng=None,
    rollout_reps: int = 4,
    imbalance_tolerance: float = 0.1,
    deadline: Deadline | None = None,
) -> tuple[Action, dict]:
    """T-partition variant: round i spends the whole budget inside partition i.

    An undersized or partly spent partition borrows the highest-DC eligible
    nodes from partitions it shares edges with (any partition as a fallback).
    The K-subset is built greedily by iterated single-node TASP picks; the
    remaining interventions contribute no further picks inside this part, so
    the rollout horizon collapses into one long diffusion window.
    """
    from .partitioning import cut_weight

    if not 1 <= round_index <= t_total:
        raise ValueError("round_index must lie in [1, T]")
    rng = rng_from(rng)
    part_seed = int(rng.integers(1 << 31))
    resolved = apply_observations(net, b.known_edges)
    parting = partition(resolved, t_total, imbalance_tolerance, seed=part_seed)
    part_nodes = [int(v) for v in parting.part_nodes(round_index - 1)]
    chosen = b.chosen_nodes()
    eligible = [v for v in part_nodes if v not in chosen]
    borrowed: list[int] = []

    if len(eligible) < k:
        part_set = set(part_nodes)
        touching = set()
        for e in resolved.edges():
            if e.src in part_set and e.dst not in part_set:
                touching.add(e.dst)
            elif e.dst in part_set and e.src not in part_set:
                touching.add(e.src)
        scores = dc_scores(resolved)
        outside = [
            v for v in range(net.n) if v not in part_set and v not in chosen
        ]
        outside.sort(key=lambda v: (v not in touching, -scores[v], v))
        borrowed = outside[: k - len(eligible)]
        if len(eligible) + len(borrowed) < k:
            raise ValueError("not enough unchosen nodes to fill the action")
        part_nodes = sorted(part_set | set(borrowed))
        eligible = [v for v in part_nodes if v not in chosen]

    sub, nodes = induced_subnetwork(resolved, part_nodes)
    ip = IntermediatePomdp(subnetwork=sub, nodes=nodes, budget=k)
    local_index = {int(v): i for i, v in enumerate(nodes)}
    eligible_local = [local_index[v] for v in eligible]

    # no future picks land in this part: one shot, then pure diffusion
    long_steps = steps * (t_total - round_index + 1)
    tables: list = []
    local_picks = _tasp_pick_nodes(
        ip, b, k, eligible_local, 1, long_steps, delta, rng, rollout_reps,
        deadline, tables=tables,
    )
    if len(local_picks) < k:
        raise ValueError("partition could not supply K distinct nodes")
    picked = [int(nodes[v]) for v in local_picks]
    diagnostics = {
        "partition_sizes": [int(s) for s in parting.sizes()],
        "cut_weight": cut_weight(resolved, parting.parts),
        "parts": [
            {"part": round_index - 1, "size": ip.subnetwork.n,
             "eligible": len(eligible), "budget": k, "picked": picked,
             "tables": tables, "borrowed": borrowed}
        ],
    }
    return Action(picked), diagnostics


def heal_t_plan(
    net: UncertainNetwork,
    b: Belief,
    k: int,
    t_total: int,
    steps: int,
    round_index: int,
    delta: int | str = 16,
    rng=None,
    rollout_reps: int = 4,
    imbalance_tolerance: float = 0.1,
    deadline: Deadline | None = None,
) -> Action:
    """T-partition variant: round i's whole budget goes to partition i."""
    action, _ = heal_t_plan_detailed(
        net, b, k, t_total, steps, round_index, delta, rng,
        rollout_reps, imbalance_tolerance, deadline,
    )
    return action
