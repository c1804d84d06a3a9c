"""Repeated-activation cascade simulation and Monte Carlo spread estimation.

Influenced nodes retry their un-influenced out-neighbors every round until
they succeed, and never revert.  Per round this is equivalent to one fresh
Bernoulli trial per live edge against each still-un-influenced target, so a
round draws exactly one uniform per edge, in edge-id order.  The fixed draw
layout is what makes coupled comparisons exact: two runs that share a
generator state see identical per-(edge, round) randomness regardless of
which nodes happen to be influenced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .netcore import InstantiatedNetwork, UncertainNetwork, sample_instance


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    stderr: float
    n_sims: int


def rng_from(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def stream(root_seed: int, *key: int) -> np.random.Generator:
    """Named child stream, stable under (root, key) regardless of call order."""
    return np.random.default_rng(np.random.SeedSequence((root_seed,) + tuple(key)))


def influence_vector(n: int, seeds: Iterable[int] = ()) -> np.ndarray:
    w = np.zeros(n, dtype=bool)
    for v in seeds:
        w[v] = True
    return w


def diffuse_round(
    inst: InstantiatedNetwork, w: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """One synchronous round: every live edge from an influenced node fires once.

    Newly influenced nodes do not propagate until the next round.
    """
    net = inst.base
    if w.shape != (net.n,):
        raise ValueError(f"influence vector has shape {w.shape}, expected ({net.n},)")
    draws = rng.random(net.m)
    fired = (
        inst.active_mask()
        & w[net.edge_src]
        & ~w[net.edge_dst]
        & (draws < net.edge_p)
    )
    out = w.copy()
    out[net.edge_dst[fired]] = True
    return out


def simulate_cascade(
    inst: InstantiatedNetwork, w0: np.ndarray, steps: int, rng: np.random.Generator
) -> np.ndarray:
    """Run ``steps`` rounds; each round consumes exactly one uniform per edge."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    w = w0.copy()
    for _ in range(steps):
        w = diffuse_round(inst, w, rng)
    return w


def batch_cascade(
    net: UncertainNetwork,
    active: np.ndarray,
    w: np.ndarray,
    steps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized cascades: ``w`` is (B, N), ``active`` is (M,) or (B, M).

    Mutates and returns ``w``.  Row b of round t uses draws[b, :] of that
    round's (B, M) uniform block, matching the scalar path's layout.
    """
    if steps == 0:
        return w
    src, dst, p = net.edge_src, net.edge_dst, net.edge_p
    if active.ndim == 1:
        active = active[None, :]
    for _ in range(steps):
        draws = rng.random((w.shape[0], net.m))
        fired = active & w[:, src] & ~w[:, dst] & (draws < p[None, :])
        rows, cols = np.nonzero(fired)
        w[rows, dst[cols]] = True
    return w


def estimate_spread(
    net: UncertainNetwork,
    seeds: Iterable[int],
    steps: int,
    n_sims: int,
    rng,
) -> SpreadEstimate:
    """Monte Carlo spread: draw an instance per sim, cascade, average the counts."""
    if n_sims < 1:
        raise ValueError("n_sims must be >= 1")
    rng = rng_from(rng)
    w0 = influence_vector(net.n, seeds)
    counts = np.empty(n_sims, dtype=np.int64)
    done = 0
    # chunked so huge n_sims stays within memory
    chunk = max(1, min(n_sims, (1 << 22) // max(net.m, 1)))
    while done < n_sims:
        b = min(chunk, n_sims - done)
        kept = rng.random((b, net.n_uncertain)) < net.uncertain_u
        active = np.concatenate(
            [np.ones((b, net.n_certain), dtype=bool), kept], axis=1
        )
        w = np.broadcast_to(w0, (b, net.n)).copy()
        w = batch_cascade(net, active, w, steps, rng)
        counts[done : done + b] = w.sum(axis=1)
        done += b
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / np.sqrt(n_sims)) if n_sims > 1 else 0.0
    return SpreadEstimate(mean=mean, stderr=stderr, n_sims=n_sims)


def per_round_spread(
    net: UncertainNetwork,
    seeds: Iterable[int],
    steps: int,
    n_sims: int,
    rng,
) -> list[SpreadEstimate]:
    """Mean influenced count after each round 1..steps (round 0 excluded)."""
    rng = rng_from(rng)
    w0 = influence_vector(net.n, seeds)
    counts = np.empty((n_sims, steps), dtype=np.int64)
    for i in range(n_sims):
        inst = sample_instance(net, rng)
        w = w0
        for t in range(steps):
            w = diffuse_round(inst, w, rng)
            counts[i, t] = w.sum()
    out = []
    for t in range(steps):
        col = counts[:, t]
        se = float(col.std(ddof=1) / np.sqrt(n_sims)) if n_sims > 1 else 0.0
        out.append(SpreadEstimate(float(col.mean()), se, n_sims))
    return out
