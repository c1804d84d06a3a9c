"""PSINET: ensemble planning by voting across sampled graph instances.

Each sampled instance resolves every uncertain edge, turning action evaluation
into plain Monte Carlo rollouts; every instance then votes with its ranking of
a shared candidate pool, and a voting rule (plurality, binomial-weighted, or
Copeland) aggregates the votes into the chosen action.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diffusion import rng_from
from .netcore import InstantiatedNetwork, UncertainNetwork, dc_scores, sample_instance
from .pomdp import Action, Belief, batch_rollout_returns
from .timing import Deadline, check

VARIANTS = ("S", "W", "C")


@dataclass(frozen=True)
class VoteConfig:
    variant: str = "W"
    n_instances: int = 16
    eta: int = 256  # MC rollouts per (instance, candidate)
    pool_size: int = 50

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.n_instances < 1 or self.eta < 1 or self.pool_size < 1:
            raise ValueError("n_instances, eta and pool_size must be >= 1")


@dataclass(frozen=True)
class InstanceVote:
    instance_index: int
    ranking: tuple[Action, ...]  # best first, strict order over the shared pool
    best_value: float


@dataclass(frozen=True)
class PsinetConfig:
    k: int
    horizon: int
    steps: int  # cascade rounds per intervention
    vote: VoteConfig


def candidate_actions(
    net: UncertainNetwork, b: Belief, k: int, m: int
) -> list[Action]:
    """Deterministic candidate pool: best K-subsets of the top DC nodes.

    The pool spans the top ``max(K, ceil(log2 M) * K)`` eligible nodes by
    degree-centrality score and keeps the M subsets with the largest score
    sums, enumerated lazily so large K never materializes the full
    combination space.  The plain top-K-by-DC action is always element 0.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    chosen = b.chosen_nodes()
    scores = dc_scores(net)
    eligible = sorted(
        (v for v in range(net.n) if v not in chosen),
        key=lambda v: (-scores[v], v),
    )
    if len(eligible) < k:
        raise ValueError(f"only {len(eligible)} eligible nodes for K={k}")
    pool_n = min(len(eligible), max(k, math.ceil(math.log2(m)) * k if m > 1 else k))
    pool = eligible[:pool_n]
    pool_scores = scores[pool]

    # lazy best-first enumeration of index combos by descending score sum
    def canon(combo: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(sorted(pool[i] for i in combo))

    start = tuple(range(k))
    heap = [(-float(pool_scores[list(start)].sum()), canon(start), start)]
    seen = {start}
    out: list[Action] = []
    while heap and len(out) < m:
        _, nodes, combo = heapq.heappop(heap)
        out.append(Action(nodes))
        for i in range(k):
            nxt = combo[i] + 1
            if nxt >= pool_n or (i + 1 < k and nxt >= combo[i + 1]):
                continue
            succ = combo[:i] + (nxt,) + combo[i + 1:]
            if succ in seen:
                continue
            seen.add(succ)
            heapq.heappush(
                heap, (-float(pool_scores[list(succ)].sum()), canon(succ), succ)
            )
    return out


def best_action_for_instance(
    inst: InstantiatedNetwork,
    b: Belief,
    candidates: Sequence[Action],
    eta: int,
    horizon: int,
    steps: int,
    rng,
    instance_index: int = 0,
    deadline: Deadline | None = None,
) -> InstanceVote:
    """Rank the candidates on one resolved instance by mean rollout value.

    All candidates share the same ``eta`` particle draws (their existence bits
    replaced by the instance), so the ranking is a paired comparison.  Ties
    break lexicographically on the action itself.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    net = inst.base
    rng = rng_from(rng)
    idx = rng.integers(0, b.n_particles, size=eta)
    w_block = b.W[idx]
    active = inst.active_mask()
    k = len(candidates[0])

    means = np.empty(len(candidates), dtype=np.float64)
    rows_budget = 1 << 21
    chunk = max(1, rows_budget // max(1, eta * net.n))
    for c0 in range(0, len(candidates), chunk):
        check(deadline)
        group = candidates[c0 : c0 + chunk]
        w0 = np.tile(w_block, (len(group), 1))
        first = np.repeat(
            np.array([a.nodes for a in group], dtype=np.int64), eta, axis=0
        )
        returns = batch_rollout_returns(
            net, active, w0, first, horizon, steps, k, rng
        )
        means[c0 : c0 + chunk] = returns.reshape(len(group), eta).mean(axis=1)

    order = sorted(range(len(candidates)), key=lambda i: (-means[i], candidates[i].nodes))
    ranking = tuple(candidates[i] for i in order)
    return InstanceVote(
        instance_index=instance_index,
        ranking=ranking,
        best_value=float(means[order[0]]),
    )


# -- voting rules --------------------------------------------------------------


def vote_plurality(votes: Sequence[InstanceVote]) -> Action:
    """Most first-place votes; ties go to the lexicographically smallest action."""
    if not votes:
        raise ValueError("need at least one vote")
    counts = Counter(v.ranking[0] for v in votes)
    return min(counts.items(), key=lambda kv: (-kv[1], kv[0].nodes))[0]


def removal_weight(n_uncertain: int, removed: int) -> float:
    """Binomial weight C(n, m) / 2^n on the number of removed uncertain edges."""
    if not 0 <= removed <= n_uncertain:
        raise ValueError("removed count out of range")
    return math.comb(n_uncertain, removed) / float(2 ** n_uncertain)


def vote_weighted(
    votes: Sequence[InstanceVote], instance_f_vectors: Sequence[np.ndarray]
) -> Action:
    """First-place votes weighted by how typical the instance's removal count is.

    Instances that removed about half of the uncertain edges dominate;
    extreme instances (almost none or almost all removed) count little.
    """
    if not votes:
        raise ValueError("need at least one vote")
    if len(votes) != len(instance_f_vectors):
        raise ValueError("one existence vector per vote required")
    totals: dict[Action, float] = {}
    for v, kept in zip(votes, instance_f_vectors):
        kept = np.asarray(kept, dtype=bool)
        n_u = kept.shape[0]
        removed = int(n_u - kept.sum())
        w = removal_weight(n_u, removed) if n_u else 1.0
        top = v.ranking[0]
        totals[top] = totals.get(top, 0.0) + w
    return min(totals.items(), key=lambda kv: (-kv[1], kv[0].nodes))[0]


def vote_copeland(votes: Sequence[InstanceVote]) -> Action:
    """Copeland rule: pairwise wins minus losses under strict-majority comparisons."""
    if not votes:
        raise ValueError("need at least one vote")
    cands = sorted(votes[0].ranking, key=lambda a: a.nodes)
    cand_set = set(cands)
    rank_of = []
    for v in votes:
        if set(v.ranking) != cand_set or len(v.ranking) != len(cands):
            raise ValueError("all votes must rank the same candidate set")
        rank_of.append({a: i for i, a in enumerate(v.ranking)})
    score = {a: 0 for a in cands}
    n = len(votes)
    for i, a in enumerate(cands):
        for bq in cands[i + 1:]:
            prefer_a = sum(1 for r in rank_of if r[a] < r[bq])
            if 2 * prefer_a > n:
                score[a] += 1
                score[bq] -= 1
            elif 2 * prefer_a < n:
                score[a] -= 1
                score[bq] += 1
    return min(score.items(), key=lambda kv: (-kv[1], kv[0].nodes))[0]


# -- the planner ----------------------------------------------------------------


def psinet_plan_detailed(
    net: UncertainNetwork,
    b: Belief,
    cfg: PsinetConfig,
    rng,
    deadline: Deadline | None = None,
) -> tuple[Action, list[InstanceVote], list[np.ndarray]]:
    """Sample instances, collect their votes, aggregate per the configured rule.

    Returns the winner plus the per-instance vote table for audit output.
    Deterministic for a fixed generator state.
    """
    rng = rng_from(rng)
    vote_cfg = cfg.vote
    candidates = candidate_actions(net, b, cfg.k, vote_cfg.pool_size)
    instances = [sample_instance(net, rng) for _ in range(vote_cfg.n_instances)]
    eval_rngs = rng.spawn(vote_cfg.n_instances)
    votes = []
    for i, (inst, child) in enumerate(zip(instances, eval_rngs)):
        check(deadline)
        votes.append(
            best_action_for_instance(
                inst,
                b,
                candidates,
                vote_cfg.eta,
                cfg.horizon,
                cfg.steps,
                child,
                instance_index=i,
                deadline=deadline,
            )
        )
    kept_vectors = [inst.kept for inst in instances]
    if vote_cfg.variant == "S":
        winner = vote_plurality(votes)
    elif vote_cfg.variant == "W":
        winner = vote_weighted(votes, kept_vectors)
    else:
        winner = vote_copeland(votes)
    return winner, votes, kept_vectors


def psinet_plan(
    net: UncertainNetwork,
    b: Belief,
    cfg: PsinetConfig,
    rng,
    deadline: Deadline | None = None,
) -> Action:
    winner, _, _ = psinet_plan_detailed(net, b, cfg, rng, deadline)
    return winner
