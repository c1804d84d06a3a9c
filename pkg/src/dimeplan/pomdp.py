"""POMDP view of sequential intervention planning on an uncertain network.

A state pairs the node-influence bits with the uncertain-edge existence bits.
Actions are K-node subsets; taking one influences those nodes outright,
reveals the existence bits of their outgoing uncertain edges, and lets the
cascade run for a configured number of rounds.  Reward is the number of newly
influenced nodes, so episode rewards telescope to the final spread.

Beliefs track the observations accumulated so far exactly (edge bits are
independent, so observed bits clamp and unobserved bits keep their priors)
and approximate the influence distribution with a particle set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .diffusion import batch_cascade, rng_from, simulate_cascade, stream
from .netcore import InstantiatedNetwork, UncertainNetwork

DEFAULT_PARTICLES = 1 << 10


@dataclass(frozen=True)
class Action:
    """Canonical (sorted) set of chosen nodes; equality and order are tuple-wise."""

    nodes: tuple[int, ...]

    def __init__(self, nodes: Iterable[int]):
        nodes = tuple(sorted(int(v) for v in nodes))
        if len(nodes) == 0:
            raise ValueError("action cannot be empty")
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"action nodes must be distinct, got {nodes}")
        object.__setattr__(self, "nodes", nodes)

    def __lt__(self, other: "Action") -> bool:
        return self.nodes < other.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def validate(self, net: UncertainNetwork, k: int | None = None) -> None:
        if k is not None and len(self.nodes) != k:
            raise ValueError(f"action has {len(self.nodes)} nodes, expected {k}")
        if len(self.nodes) > net.n:
            raise ValueError("action larger than the network")
        if self.nodes[0] < 0 or self.nodes[-1] >= net.n:
            raise ValueError("action references nodes outside the network")


@dataclass(frozen=True)
class Observation:
    """Existence bits for the uncertain edges leaving an action, by edge id."""

    entries: tuple[tuple[int, int], ...]

    def __init__(self, entries: Iterable[tuple[int, int]]):
        entries = tuple(sorted((int(e), int(b)) for e, b in entries))
        object.__setattr__(self, "entries", entries)

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.entries)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)


class PomdpState:
    """Immutable ⟨influence bits, existence bits⟩ pair."""

    __slots__ = ("w", "f")

    def __init__(self, w: np.ndarray, f: np.ndarray):
        w = np.asarray(w, dtype=bool).copy()
        f = np.asarray(f, dtype=bool).copy()
        w.setflags(write=False)
        f.setflags(write=False)
        self.w = w
        self.f = f

    def spread(self) -> int:
        return int(self.w.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PomdpState):
            return NotImplemented
        return bool((self.w == other.w).all() and (self.f == other.f).all())


@dataclass(frozen=True)
class GenerativeOutcome:
    next_state: PomdpState
    obs: Observation
    reward: int


@dataclass(frozen=True)
class HistoryEntry:
    action: Action
    observation: Observation
    influenced: tuple[int, ...]  # nodes marked influenced this round


class Belief:
    """Edge observations plus a uniform-weight particle set over states.

    ``W`` is (particles, N) and ``F`` is (particles, |E_u|); rows pair up.
    """

    def __init__(
        self,
        net: UncertainNetwork,
        W: np.ndarray,
        F: np.ndarray,
        known_edges: Mapping[int, int],
        history: tuple[HistoryEntry, ...] = (),
    ):
        self.net = net
        self.W = np.asarray(W, dtype=bool)
        self.F = np.asarray(F, dtype=bool)
        if self.W.shape[0] != self.F.shape[0]:
            raise ValueError("W and F particle counts differ")
        if self.W.shape[1] != net.n or self.F.shape[1] != net.n_uncertain:
            raise ValueError("particle arrays do not match the network")
        self.W.setflags(write=False)
        self.F.setflags(write=False)
        self.known_edges = dict(known_edges)
        self.history = tuple(history)

    @property
    def n_particles(self) -> int:
        return self.W.shape[0]

    def particle(self, i: int) -> PomdpState:
        return PomdpState(self.W[i], self.F[i])

    def sample_particle(self, rng) -> PomdpState:
        return self.particle(int(rng_from(rng).integers(self.n_particles)))

    def mean_spread(self) -> float:
        return float(self.W.sum(axis=1).mean())

    def f_marginals(self) -> np.ndarray:
        return self.F.mean(axis=0)

    def chosen_nodes(self) -> frozenset[int]:
        """Nodes marked influenced by any past intervention (planner exclusions)."""
        out: set[int] = set()
        for entry in self.history:
            out.update(entry.influenced)
        return frozenset(out)

    def round_index(self) -> int:
        """1-based index of the next round."""
        return len(self.history) + 1


def initial_belief(
    net: UncertainNetwork, n_particles: int = DEFAULT_PARTICLES, rng=None
) -> Belief:
    """All particles un-influenced; existence bits drawn from their priors."""
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    rng = rng_from(rng)
    W = np.zeros((n_particles, net.n), dtype=bool)
    F = rng.random((n_particles, net.n_uncertain)) < net.uncertain_u
    return Belief(net, W, F, known_edges={}, history=())


def observed_edge_set(a: Action, net: UncertainNetwork) -> tuple[int, ...]:
    """Ids of uncertain edges leaving the action's nodes, ascending."""
    ids: list[int] = []
    for v in a.nodes:
        ids.extend(net.uncertain_out_ids(v))
    return tuple(sorted(ids))


def observation_of(f: np.ndarray, a: Action, net: UncertainNetwork) -> Observation:
    """The deterministic observation produced by taking ``a`` in a state with bits ``f``."""
    return Observation(
        (eid, int(f[net.f_index(eid)])) for eid in observed_edge_set(a, net)
    )


def generative_step(
    s: PomdpState, a: Action, steps: int, net: UncertainNetwork, rng
) -> GenerativeOutcome:
    """Simulate one intervention: influence the chosen nodes, cascade, observe."""
    a.validate(net)
    rng = rng_from(rng)
    w = s.w.copy()
    w[list(a.nodes)] = True
    inst = InstantiatedNetwork(net, s.f)
    w = simulate_cascade(inst, w, steps, rng)
    obs = observation_of(s.f, a, net)
    reward = int(w.sum()) - s.spread()
    return GenerativeOutcome(PomdpState(w, s.f), obs, reward)


def belief_update(
    b: Belief,
    a: Action,
    o: Observation,
    steps: int,
    rng,
    influenced: Sequence[int] | None = None,
) -> Belief:
    """Condition on an observation and advance every particle one intervention.

    Existence bits are filtered exactly: observed bits clamp to their revealed
    values, unobserved bits resample from their priors.  Influence bits evolve
    by replaying the intervention on a particle drawn from the current set.
    ``influenced`` overrides which of the action's nodes actually became
    influenced (session use); by default all of them did.
    """
    net = b.net
    expected = observed_edge_set(a, net)
    if o.edge_ids != expected:
        raise ValueError(
            f"observation covers edges {o.edge_ids}, expected {expected}"
        )
    for eid, bit in o.entries:
        old = b.known_edges.get(eid)
        if old is not None and old != bit:
            raise ValueError(f"edge {eid} re-observed with a different value")
    known = dict(b.known_edges)
    known.update(o.entries)

    rng = rng_from(rng)
    n_p = b.n_particles
    src = rng.integers(0, n_p, size=n_p)
    F = rng.random((n_p, net.n_uncertain)) < net.uncertain_u
    for eid, bit in known.items():
        F[:, net.f_index(eid)] = bool(bit)

    marked = tuple(a.nodes) if influenced is None else tuple(sorted(set(influenced)))
    for v in marked:
        if v not in a.nodes:
            raise ValueError(f"influenced node {v} is not part of the action")
    W = b.W[src].copy()
    if marked:
        W[:, list(marked)] = True
    active = np.concatenate(
        [np.ones((n_p, net.n_certain), dtype=bool), F], axis=1
    )
    W = batch_cascade(net, active, W, steps, rng)

    entry = HistoryEntry(action=a, observation=o, influenced=marked)
    return Belief(net, W, F, known, b.history + (entry,))


def rollout_value(b: Belief, a: Action, horizon: int, steps: int, rng) -> float:
    """One Monte Carlo rollout: take ``a``, then uniform random actions to the horizon.

    Returns the cumulative reward, which telescopes to the spread gained over
    the whole rollout.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = rng_from(rng)
    s = b.sample_particle(rng)
    net = b.net
    k = len(a)
    inst = InstantiatedNetwork(net, s.f)
    w = s.w.copy()
    w[list(a.nodes)] = True
    w = simulate_cascade(inst, w, steps, rng)
    for _ in range(horizon - 1):
        if w.all():
            break
        nodes = rng.permutation(net.n)[:k]
        w[nodes] = True
        w = simulate_cascade(inst, w, steps, rng)
    return float(w.sum() - s.w.sum())


# -- batched rollout engine (planner internals) -------------------------------


def random_k_subsets(rng, rows: int, n: int, k: int) -> np.ndarray:
    """(rows, k) matrix of uniform random distinct node picks."""
    if k >= n:
        return np.tile(np.arange(n), (rows, 1))
    r = rng.random((rows, n))
    return np.argpartition(r, k - 1, axis=1)[:, :k]


def batch_rollout_returns(
    net: UncertainNetwork,
    active: np.ndarray,
    w0: np.ndarray,
    first_actions: np.ndarray,
    horizon: int,
    steps: int,
    cont_k: int,
    rng,
) -> np.ndarray:
    """Cumulative reward of ``first_actions`` followed by uniform random actions.

    ``w0`` is (B, N) and is not mutated; ``first_actions`` is (B, K);
    ``active`` broadcasts per `batch_cascade`.  Returns (B,) float rewards.
    """
    rng = rng_from(rng)
    b_rows = w0.shape[0]
    w = w0.copy()
    row_idx = np.arange(b_rows)[:, None]
    w[row_idx, first_actions] = True
    w = batch_cascade(net, active, w, steps, rng)
    for _ in range(horizon - 1):
        if w.all():
            break
        acts = random_k_subsets(rng, b_rows, net.n, cont_k)
        w[row_idx, acts] = True
        w = batch_cascade(net, active, w, steps, rng)
    return (w.sum(axis=1) - w0.sum(axis=1)).astype(np.float64)


# -- belief replay files -------------------------------------------------------


def belief_to_replay_dict(b: Belief, seed: int) -> dict:
    """Replayable form: seed plus the (action, observation, influenced) rounds."""
    return {
        "n_particles": b.n_particles,
        "seed": int(seed),
        "rounds": [
            {
                "action": list(e.action.nodes),
                "observation": [[eid, bit] for eid, bit in e.observation.entries],
                "influenced": list(e.influenced),
            }
            for e in b.history
        ],
    }


def belief_from_replay(net: UncertainNetwork, doc: Mapping, steps: int) -> Belief:
    seed = int(doc.get("seed", 0))
    n_particles = int(doc.get("n_particles", DEFAULT_PARTICLES))
    b = initial_belief(net, n_particles, stream(seed, 0))
    for t, entry in enumerate(doc.get("rounds", []), start=1):
        a = Action(entry["action"])
        o = Observation((int(e), int(bit)) for e, bit in entry["observation"])
        influenced = entry.get("influenced")
        b = belief_update(b, a, o, steps, stream(seed, t), influenced=influenced)
    return b


def save_belief(b: Belief, seed: int, path: str | Path) -> None:
    Path(path).write_text(json.dumps(belief_to_replay_dict(b, seed), indent=1) + "\n")


def load_belief(net: UncertainNetwork, path: str | Path, steps: int) -> Belief:
    return belief_from_replay(net, json.loads(Path(path).read_text()), steps)
