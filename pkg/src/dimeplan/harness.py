"""Episode simulation, baseline planners, experiments and diagnostics.

An episode draws a hidden ground-truth resolution of the uncertain edges,
then alternates planner choices with simulated diffusion for T rounds.  The
planner sees only the network, its belief and the revealed edge bits; the
hidden influence state stays inside the environment loop.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .diffusion import batch_cascade, rng_from, stream
from .heal import heal_plan, heal_t_plan
from .netcore import (
    InstantiatedNetwork,
    UncertainNetwork,
    dc_scores,
    f_vector_probability,
    generate_community,
    generate_er,
    generate_two_level,
    generate_ws,
    load_network,
)
from .pomdp import (
    Action,
    Belief,
    Observation,
    belief_update,
    initial_belief,
    observation_of,
)
from .psinet import PsinetConfig, VoteConfig, psinet_plan
from .timing import Deadline, PlanningTimeout


class InvalidActionError(ValueError):
    """Planner produced an action the episode loop cannot accept."""


@dataclass(frozen=True)
class PlannerContext:
    k: int
    t_total: int
    steps: int
    round_index: int
    rng: np.random.Generator
    deadline: Deadline | None = None


Planner = Callable[[UncertainNetwork, Belief, PlannerContext], Action]


@dataclass(frozen=True)
class RoundRecord:
    action: Action
    observation: Observation
    spread_after: int  # hidden post-round influenced count
    influenced_after: tuple[int, ...]  # hidden post-round influence vector support
    plan_seconds: float


@dataclass(frozen=True)
class EpisodeRecord:
    network_name: str
    planner_name: str
    k: int
    t_total: int
    steps: int
    root_seed: tuple[int, ...]
    true_f: tuple[int, ...]
    rounds: tuple[RoundRecord, ...]
    final_spread: int
    # set by the loop: planners only ever received (network, belief, observations)
    ground_truth_isolated: bool = True

    def to_dict(self) -> dict:
        return {
            "network": self.network_name,
            "planner": self.planner_name,
            "K": self.k,
            "T": self.t_total,
            "L": self.steps,
            "root_seed": list(self.root_seed),
            "true_f": list(self.true_f),
            "final_spread": self.final_spread,
            "ground_truth_isolated": self.ground_truth_isolated,
            "rounds": [
                {
                    "action": list(r.action.nodes),
                    "observation": [[e, bit] for e, bit in r.observation.entries],
                    "spread_after": r.spread_after,
                    "influenced_after": list(r.influenced_after),
                    "plan_seconds": r.plan_seconds,
                }
                for r in self.rounds
            ],
        }


def save_episode(rec: EpisodeRecord, path: str | Path) -> None:
    Path(path).write_text(json.dumps(rec.to_dict(), indent=1) + "\n")


# -- baseline planners ----------------------------------------------------------


def dc_plan(net: UncertainNetwork, b: Belief, k: int) -> Action:
    """Top K unchosen nodes by degree-centrality score, ties by node id."""
    chosen = b.chosen_nodes()
    scores = dc_scores(net)
    eligible = sorted(
        (v for v in range(net.n) if v not in chosen),
        key=lambda v: (-scores[v], v),
    )
    if len(eligible) < k:
        raise InvalidActionError(f"only {len(eligible)} eligible nodes for K={k}")
    return Action(eligible[:k])


def random_plan(net: UncertainNetwork, b: Belief, k: int, rng) -> Action:
    """Uniform K-subset of the unchosen nodes."""
    rng = rng_from(rng)
    chosen = b.chosen_nodes()
    eligible = [v for v in range(net.n) if v not in chosen]
    if len(eligible) < k:
        raise InvalidActionError(f"only {len(eligible)} eligible nodes for K={k}")
    picks = rng.choice(len(eligible), size=k, replace=False)
    return Action(eligible[i] for i in picks)


def adaptive_greedy_plan(
    net: UncertainNetwork,
    b: Belief,
    k: int,
    steps: int,
    horizon: int = 1,
    n_sims: int = 64,
    rng=None,
) -> tuple[Action, list[float]]:
    """Build the action one node at a time by Monte Carlo marginal spread.

    Expectations run over belief particles (existence bits and influence
    state) and cascade randomness for ``steps * horizon`` rounds.  Returns the
    action and the marginal-gain sequence of the greedy additions.
    """
    if n_sims < 1:
        raise ValueError("n_sims must be >= 1")
    rng = rng_from(rng)
    chosen = b.chosen_nodes()
    eligible = [v for v in range(net.n) if v not in chosen]
    if len(eligible) < k:
        raise InvalidActionError(f"only {len(eligible)} eligible nodes for K={k}")
    sim_steps = steps * max(1, horizon)

    idx = rng.integers(0, b.n_particles, size=n_sims)
    w_block = b.W[idx]
    f_block = b.F[idx]
    active_block = np.concatenate(
        [np.ones((n_sims, net.n_certain), dtype=bool), f_block], axis=1
    )

    picked: list[int] = []
    gains: list[float] = []
    base_w = w_block.copy()
    base_value = float(
        batch_cascade(net, active_block, base_w.copy(), sim_steps, rng_from(rng.spawn(1)[0]))
        .sum(axis=1)
        .mean()
    )
    for _ in range(k):
        cand = [v for v in eligible if v not in picked]
        rows = len(cand) * n_sims
        w = np.tile(base_w, (len(cand), 1))
        cand_col = np.repeat(np.array(cand, dtype=np.int64), n_sims)
        w[np.arange(rows), cand_col] = True
        active = np.tile(active_block, (len(cand), 1))
        w = batch_cascade(net, active, w, sim_steps, rng)
        values = w.sum(axis=1).reshape(len(cand), n_sims).mean(axis=1)
        order = sorted(range(len(cand)), key=lambda i: (-values[i], cand[i]))
        best = order[0]
        gains.append(float(values[best] - base_value))
        base_value = float(values[best])
        picked.append(cand[best])
        base_w[:, cand[best]] = True
    return Action(picked), gains


# -- the episode loop -----------------------------------------------------------


def run_episode(
    net: UncertainNetwork,
    planner: Planner,
    k: int,
    t_total: int,
    steps: int,
    seed: int | tuple[int, ...],
    n_particles: int = 512,
    time_budget: float | None = None,
    planner_name: str = "",
) -> EpisodeRecord:
    """Play one full T-round episode against a sampled ground truth.

    The ground-truth existence vector is drawn once; planners receive only
    the network and the belief.  Hidden influence is never revealed to them.
    Raises PlanningTimeout when a round exceeds ``time_budget`` seconds.
    """
    key = (seed,) if isinstance(seed, int) else tuple(seed)
    if k * t_total > net.n:
        import warnings

        warnings.warn(f"K*T = {k * t_total} exceeds N = {net.n}; rounds may fail")

    true_kept = stream(*key, 0).random(net.n_uncertain) < net.uncertain_u
    inst = InstantiatedNetwork(net, true_kept)
    belief = initial_belief(net, n_particles, stream(*key, 1))
    w_hidden = np.zeros(net.n, dtype=bool)
    seen_nodes: set[int] = set()
    rounds: list[RoundRecord] = []

    for t in range(1, t_total + 1):
        deadline = Deadline.after(time_budget) if time_budget else None
        ctx = PlannerContext(
            k=k,
            t_total=t_total,
            steps=steps,
            round_index=t,
            rng=stream(*key, 2, t),
            deadline=deadline,
        )
        t0 = time.perf_counter()
        action = planner(net, belief, ctx)
        plan_seconds = time.perf_counter() - t0

        if not isinstance(action, Action) or len(action.nodes) != k:
            raise InvalidActionError(
                f"round {t}: planner returned {action!r}, expected {k} distinct nodes"
            )
        action.validate(net, k)
        repeats = seen_nodes.intersection(action.nodes)
        if repeats:
            raise InvalidActionError(
                f"round {t}: nodes {sorted(repeats)} were already chosen"
            )
        seen_nodes.update(action.nodes)

        obs = observation_of(true_kept, action, net)
        w_hidden[list(action.nodes)] = True
        w_hidden = batch_cascade(
            net, inst.active_mask(), w_hidden[None, :].copy(), steps, stream(*key, 3, t)
        )[0]
        belief = belief_update(belief, action, obs, steps, stream(*key, 4, t))
        rounds.append(
            RoundRecord(
                action=action,
                observation=obs,
                spread_after=int(w_hidden.sum()),
                influenced_after=tuple(int(v) for v in np.flatnonzero(w_hidden)),
                plan_seconds=plan_seconds,
            )
        )

    return EpisodeRecord(
        network_name=net.name,
        planner_name=planner_name,
        k=k,
        t_total=t_total,
        steps=steps,
        root_seed=key,
        true_f=tuple(int(x) for x in true_kept),
        rounds=tuple(rounds),
        final_spread=int(w_hidden.sum()),
    )


def fixed_policy_spread_mc(
    net: UncertainNetwork,
    round_actions: Sequence[Sequence[int]],
    steps: int,
    n_sims: int,
    rng,
) -> tuple[float, float]:
    """Monte Carlo spread of a predetermined action sequence; (mean, stderr).

    Vectorized across simulations: each sim draws its own ground truth and its
    own cascade randomness.
    """
    rng = rng_from(rng)
    counts = np.empty(n_sims, dtype=np.int64)
    done = 0
    chunk = max(1, (1 << 22) // max(net.m, 1))
    while done < n_sims:
        b = min(chunk, n_sims - done)
        kept = rng.random((b, net.n_uncertain)) < net.uncertain_u
        active = np.concatenate(
            [np.ones((b, net.n_certain), dtype=bool), kept], axis=1
        )
        w = np.zeros((b, net.n), dtype=bool)
        for nodes in round_actions:
            w[:, list(nodes)] = True
            w = batch_cascade(net, active, w, steps, rng)
        counts[done : done + b] = w.sum(axis=1)
        done += b
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(n_sims)) if n_sims > 1 else 0.0
    return mean, stderr


# -- planner registry -----------------------------------------------------------


def make_planner(name: str, params: Mapping | None = None) -> Planner:
    """Planner factory used by the experiment runner, the CLI and the service."""
    params = dict(params or {})

    if name == "dc":
        return lambda net, b, ctx: dc_plan(net, b, ctx.k)
    if name == "random":
        return lambda net, b, ctx: random_plan(net, b, ctx.k, ctx.rng)
    if name == "greedy":
        n_sims = int(params.get("n_sims", 64))

        def greedy(net, b, ctx):
            action, _ = adaptive_greedy_plan(
                net, b, ctx.k, ctx.steps, horizon=1, n_sims=n_sims, rng=ctx.rng
            )
            return action

        return greedy
    if name.startswith("psinet"):
        variant = name.split("_", 1)[1].upper() if "_" in name else "W"
        vote = VoteConfig(
            variant=variant,
            n_instances=int(params.get("delta", 16)),
            eta=int(params.get("eta", 256)),
            pool_size=int(params.get("pool", 50)),
        )

        def psinet(net, b, ctx):
            cfg = PsinetConfig(
                k=ctx.k,
                horizon=ctx.t_total - ctx.round_index + 1,
                steps=ctx.steps,
                vote=vote,
            )
            return psinet_plan(net, b, cfg, ctx.rng, deadline=ctx.deadline)

        return psinet
    if name == "heal":
        delta = params.get("delta", 16)
        reps = int(params.get("rollout_reps", 4))
        return lambda net, b, ctx: heal_plan(
            net, b, ctx.k, ctx.t_total, ctx.steps, ctx.round_index,
            delta=delta, rng=ctx.rng, rollout_reps=reps, deadline=ctx.deadline,
        )
    if name == "heal_t":
        delta = params.get("delta", 16)
        reps = int(params.get("rollout_reps", 4))
        return lambda net, b, ctx: heal_t_plan(
            net, b, ctx.k, ctx.t_total, ctx.steps, ctx.round_index,
            delta=delta, rng=ctx.rng, rollout_reps=reps, deadline=ctx.deadline,
        )
    raise ValueError(f"unknown planner {name!r}")


PLANNER_NAMES = ("dc", "random", "greedy", "psinet_s", "psinet_w", "psinet_c", "heal", "heal_t")


# -- adaptive-submodularity counterexample search --------------------------------


@dataclass(frozen=True)
class AdasubWitness:
    """Evidence that a longer history can raise a node's exact marginal gain."""

    network: UncertainNetwork
    steps: int
    base_history: tuple[tuple[int, dict[int, int]], ...]  # (chosen node, observed bits)
    extended_history: tuple[tuple[int, dict[int, int]], ...]
    node: int
    marginal_base: float
    marginal_extended: float


def _round_activation_dist(prob_by_state, adj_p, n):
    """One exact synchronous round on a distribution over influenced sets."""
    out: dict[frozenset, float] = {}
    for state, prob in prob_by_state.items():
        stay = {}
        cand = []
        for v in range(n):
            if v in state:
                continue
            q = 1.0
            for u in state:
                q *= 1.0 - adj_p.get((u, v), 0.0)
            act_p = 1.0 - q
            if act_p > 0.0:
                cand.append((v, act_p))
        if not cand:
            out[state] = out.get(state, 0.0) + prob
            continue
        for bits in itertools.product((0, 1), repeat=len(cand)):
            p_outcome = prob
            added = set()
            for (v, act_p), bit in zip(cand, bits):
                if bit:
                    p_outcome *= act_p
                    added.add(v)
                else:
                    p_outcome *= 1.0 - act_p
            if p_outcome == 0.0:
                continue
            ns = frozenset(state | added)
            out[ns] = out.get(ns, 0.0) + p_outcome
    return out


def exact_expected_spread(
    net: UncertainNetwork, kept: Sequence[int], seeds: Iterable[int], steps: int
) -> float:
    """Exact expected influenced count on one instance via distribution evolution."""
    adj_p: dict[tuple[int, int], float] = {}
    for e in net.certain_edges:
        adj_p[(e.src, e.dst)] = 1.0 - (1.0 - adj_p.get((e.src, e.dst), 0.0)) * (1.0 - e.p)
    for i, e in enumerate(net.uncertain_edges):
        if kept[i]:
            adj_p[(e.src, e.dst)] = 1.0 - (1.0 - adj_p.get((e.src, e.dst), 0.0)) * (1.0 - e.p)
    dist = {frozenset(int(v) for v in seeds): 1.0}
    for _ in range(steps):
        dist = _round_activation_dist(dist, adj_p, net.n)
    return sum(len(s) * p for s, p in dist.items())


def _exact_spread_by_outcomes(
    net: UncertainNetwork, kept: Sequence[int], seeds: Iterable[int], steps: int
) -> float:
    """Independent recomputation: enumerate every per-(edge, round) trial outcome."""
    live = [e for e in net.certain_edges] + [
        e for i, e in enumerate(net.uncertain_edges) if kept[i]
    ]
    m = len(live)
    seeds = frozenset(int(v) for v in seeds)
    total = 0.0
    for outcome in itertools.product((0, 1), repeat=m * steps):
        prob = 1.0
        w = set(seeds)
        for t in range(steps):
            newly = set()
            for j, e in enumerate(live):
                bit = outcome[t * m + j]
                prob *= e.p if bit else 1.0 - e.p
                if bit and e.src in w and e.dst not in w:
                    newly.add(e.dst)
            w |= newly
        if prob > 0.0:
            total += prob * len(w)
    return total


def _history_posterior(net: UncertainNetwork, history) -> list[tuple[tuple[int, ...], float]]:
    """Existence vectors consistent with the history, with renormalized weights."""
    known: dict[int, int] = {}
    for _, bits in history:
        known.update(bits)
    vectors = []
    for mask in range(2 ** net.n_uncertain):
        f = tuple((mask >> i) & 1 for i in range(net.n_uncertain))
        ok = all(f[net.f_index(eid)] == bit for eid, bit in known.items())
        if not ok:
            continue
        vectors.append((f, f_vector_probability(net.uncertain_u, np.array(f, dtype=bool))))
    total = sum(p for _, p in vectors)
    return [(f, p / total) for f, p in vectors if total > 0]


def exact_marginal_gain(
    net: UncertainNetwork,
    history,
    node: int,
    steps: int,
    spread_fn=exact_expected_spread,
) -> float:
    """E[spread(dom ∪ {node}) - spread(dom)] under the history's edge posterior."""
    dom = [v for v, _ in history]
    total = 0.0
    for f, weight in _history_posterior(net, history):
        with_node = spread_fn(net, f, dom + [node], steps)
        without = spread_fn(net, f, dom, steps) if dom else 0.0
        total += weight * (with_node - without)
    return total


def verify_adasub_witness(w: AdasubWitness, tol: float = 1e-9) -> bool:
    """Re-check a witness with the independent outcome-enumeration spread."""
    base = exact_marginal_gain(
        w.network, w.base_history, w.node, w.steps, spread_fn=_exact_spread_by_outcomes
    )
    ext = exact_marginal_gain(
        w.network, w.extended_history, w.node, w.steps, spread_fn=_exact_spread_by_outcomes
    )
    return ext > base + tol


def _random_tiny_network(rng) -> UncertainNetwork | None:
    n = int(rng.integers(3, 6))
    certain, uncertain = [], []
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    rng.shuffle(pairs)
    max_edges = 6
    count = 0
    for (i, j) in pairs:
        if count >= max_edges:
            break
        r = rng.random()
        if r < 0.25:
            certain.append((i, j, float(rng.choice([0.5, 1.0]))))
            count += 1
        elif r < 0.45:
            uncertain.append((i, j, float(rng.choice([0.5, 1.0])), float(rng.choice([0.25, 0.5, 0.75]))))
            count += 1
    if not uncertain or len(uncertain) > 3:
        # nothing to observe: no history can change any posterior, skip
        return None
    return UncertainNetwork(n, certain, uncertain)


def find_adasub_counterexample(
    search_budget: int = 10_000, rng=None, steps: int = 2
) -> AdasubWitness | None:
    """Randomized search for a violation of diminishing marginal returns.

    Samples tiny networks and nested observation histories, computes the exact
    marginal gain of a spare node under both histories, and returns the first
    pair where the longer history strictly increases the marginal.  Every
    returned witness has already passed the independent verifier.
    """
    rng = rng_from(rng)
    probes = 0
    while probes < search_budget:
        net = _random_tiny_network(rng)
        if net is None:
            probes += 1
            continue
        nodes = list(range(net.n))
        rng.shuffle(nodes)
        depth = int(rng.integers(1, 3))
        if len(nodes) < depth + 2:
            probes += 1
            continue
        history: list[tuple[int, dict[int, int]]] = []
        for v in nodes[:depth]:
            bits = {eid: int(rng.random() < 0.5) for eid in net.uncertain_out_ids(v)}
            history.append((v, bits))
        base = tuple(history[:-1])
        extended = tuple(history)
        x = nodes[depth]
        probes += 1
        gain_base = exact_marginal_gain(net, base, x, steps)
        gain_ext = exact_marginal_gain(net, extended, x, steps)
        if gain_ext > gain_base + 1e-9:
            witness = AdasubWitness(
                network=net,
                steps=steps,
                base_history=base,
                extended_history=extended,
                node=x,
                marginal_base=gain_base,
                marginal_extended=gain_ext,
            )
            if verify_adasub_witness(witness):
                return witness
    return None


# -- experiment runner ------------------------------------------------------------


@dataclass
class CellResult:
    planner: str
    network: str
    seed: int
    status: str  # "ok" | "dnf"
    final_spreads: list[int] = field(default_factory=list)
    plan_seconds: list[float] = field(default_factory=list)
    episodes: list[EpisodeRecord] = field(default_factory=list)

    def mean_spread(self) -> float:
        return float(np.mean(self.final_spreads)) if self.final_spreads else float("nan")

    def stderr_spread(self) -> float:
        if len(self.final_spreads) < 2:
            return 0.0
        return float(np.std(self.final_spreads, ddof=1) / math.sqrt(len(self.final_spreads)))


@dataclass
class ExperimentReport:
    config: dict
    cells: list[CellResult]

    def summary_lines(self) -> list[str]:
        lines = ["planner network seed episodes status mean_spread stderr mean_plan_s"]
        for c in self.cells:
            mean_t = float(np.mean(c.plan_seconds)) if c.plan_seconds else float("nan")
            lines.append(
                f"{c.planner} {c.network} {c.seed} {len(c.final_spreads)} {c.status} "
                f"{c.mean_spread():.3f} {c.stderr_spread():.3f} {mean_t:.3f}"
            )
        return lines


def _build_networks(specs: Sequence[Mapping]) -> list[UncertainNetwork]:
    nets = []
    for spec in specs:
        kind = spec.get("kind")
        common = {
            "uncertain_frac": spec.get("uncertain_frac", 0.0),
            "p_range": tuple(spec.get("p_range", (0.1, 0.5))),
            "u_range": tuple(spec.get("u_range", (0.3, 0.7))),
            "seed": spec.get("seed", 0),
        }
        if kind == "er":
            net = generate_er(spec["n"], spec["edge_p"], **common)
        elif kind == "ws":
            net = generate_ws(spec["n"], spec["k_ring"], spec["rewire_p"], **common)
        elif kind == "community":
            net = generate_community(
                spec["n"], spec["blocks"], spec["p_in"], spec["p_out"], **common
            )
        elif kind == "two_level":
            net = generate_two_level(
                spec["n"],
                communities=spec.get("communities", 2),
                p_group=spec.get("p_group", 0.6),
                p_background=spec.get("p_background", 0.006),
                p_cross=spec.get("p_cross", 0.0015),
                **common,
            )
        elif kind == "file":
            net = load_network(spec["path"])
        else:
            raise ValueError(f"unknown network kind {kind!r}")
        if "name" in spec:
            net.name = spec["name"]
        nets.append(net)
    return nets


def load_experiment_config(path: str | Path) -> dict:
    try:
        import tomllib  # py >= 3.11
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def validate_experiment_config(cfg: Mapping) -> None:
    exp = cfg.get("experiment")
    if not isinstance(exp, Mapping):
        raise ValueError("config needs an [experiment] table")
    for key in ("K", "T", "L", "episodes", "seeds"):
        if key not in exp:
            raise ValueError(f"[experiment] missing {key!r}")
    if not cfg.get("planner"):
        raise ValueError("config needs at least one [[planner]] entry")
    if not cfg.get("network"):
        raise ValueError("config needs at least one [[network]] entry")
    for p in cfg["planner"]:
        name = p.get("name")
        if name not in PLANNER_NAMES:
            raise ValueError(f"unknown planner {name!r}")


def run_experiment(
    cfg: Mapping | str | Path, out_dir: str | Path | None = None
) -> ExperimentReport:
    """Run every (planner, network, seed) cell and emit tidy CSV plus a summary.

    The results CSV is free of wall-clock data, so a rerun with the same
    config is byte-identical; timings land in a separate file.  A cell whose
    planner breaches the per-round budget stops early and is reported as DNF
    with no spread statistics.
    """
    if not isinstance(cfg, Mapping):
        cfg = load_experiment_config(cfg)
    validate_experiment_config(cfg)
    exp = cfg["experiment"]
    k, t_total, steps = int(exp["K"]), int(exp["T"]), int(exp["L"])
    episodes = int(exp["episodes"])
    seeds = [int(s) for s in exp["seeds"]]
    budget = float(exp.get("time_budget_s", 0)) or None
    n_particles = int(exp.get("particles", 512))

    networks = _build_networks(cfg["network"])
    planner_specs = [(p["name"], dict(p)) for p in cfg["planner"]]

    cells: list[CellResult] = []
    for (pname, pparams), net, seed in itertools.product(planner_specs, networks, seeds):
        planner = make_planner(pname, pparams)
        cell = CellResult(planner=pname, network=net.name, seed=seed, status="ok")
        for ep in range(episodes):
            try:
                rec = run_episode(
                    net,
                    planner,
                    k,
                    t_total,
                    steps,
                    seed=(seed, ep),
                    n_particles=n_particles,
                    time_budget=budget,
                    planner_name=pname,
                )
            except PlanningTimeout:
                cell.status = "dnf"
                break
            cell.final_spreads.append(rec.final_spread)
            cell.plan_seconds.extend(r.plan_seconds for r in rec.rounds)
            cell.episodes.append(rec)
        cells.append(cell)

    report = ExperimentReport(config=dict(cfg), cells=cells)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "results.csv").write_text(results_csv(report))
        (out_dir / "timings.csv").write_text(timings_csv(report))
        (out_dir / "summary.txt").write_text("\n".join(report.summary_lines()) + "\n")
        if exp.get("save_episodes"):
            ep_dir = out_dir / "episodes"
            ep_dir.mkdir(exist_ok=True)
            for cell in cells:
                for i, rec in enumerate(cell.episodes):
                    save_episode(
                        rec,
                        ep_dir / f"{cell.planner}-{cell.network}-{cell.seed}-{i}.json",
                    )
    return report


def results_csv(report: ExperimentReport) -> str:
    """Tidy rows per (planner, network, seed, episode, round) plus cell summaries."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["kind", "planner", "network", "seed", "episode", "round", "action",
         "observation", "spread", "status"]
    )
    for c in report.cells:
        for ep_idx, rec in enumerate(c.episodes):
            for t, r in enumerate(rec.rounds, start=1):
                writer.writerow(
                    [
                        "round",
                        c.planner,
                        c.network,
                        c.seed,
                        ep_idx,
                        t,
                        "|".join(str(v) for v in r.action.nodes),
                        "|".join(f"{e}:{bit}" for e, bit in r.observation.entries),
                        r.spread_after,
                        "ok",
                    ]
                )
        mean = "" if not c.final_spreads else repr(c.mean_spread())
        writer.writerow(
            ["summary", c.planner, c.network, c.seed, len(c.final_spreads), "", "", "",
             mean, c.status]
        )
    return buf.getvalue()


def timings_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["planner", "network", "seed", "rounds_timed", "mean_plan_seconds", "max_plan_seconds"])
    for c in report.cells:
        if c.plan_seconds:
            writer.writerow(
                [c.planner, c.network, c.seed, len(c.plan_seconds),
                 f"{np.mean(c.plan_seconds):.6f}", f"{np.max(c.plan_seconds):.6f}"]
            )
        else:
            writer.writerow([c.planner, c.network, c.seed, 0, "", ""])
    return buf.getvalue()
