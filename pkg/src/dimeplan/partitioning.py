"""Balanced k-way graph partitioning for uncertain networks.

Multilevel scheme: heavy-edge-matching coarsening, greedy initial assignment
on the coarsest graph, then move/swap boundary refinement while uncoarsening.
Edge weights are ``p(e)`` for certain edges and ``u(e) * p(e)`` for uncertain
ones, so ties that probably do not exist (or barely propagate) are cheap to
cut.  Sizes respect ``ceil(N / k) * (1 + imbalance_tolerance)``.
"""

from __future__ import annotations

import math

import numpy as np


def edge_weight_matrix(net) -> np.ndarray:
    """Symmetric dense weight matrix; directed edges accumulate both ways."""
    w = np.zeros((net.n, net.n), dtype=np.float64)
    for e in net.certain_edges:
        w[e.src, e.dst] += e.p
        w[e.dst, e.src] += e.p
    for e in net.uncertain_edges:
        w[e.src, e.dst] += e.u * e.p
        w[e.dst, e.src] += e.u * e.p
    return w


def cut_weight(net, parts: np.ndarray) -> float:
    """Total weight of directed edges whose endpoints land in different parts."""
    parts = np.asarray(parts)
    total = 0.0
    for e in net.certain_edges:
        if parts[e.src] != parts[e.dst]:
            total += e.p
    for e in net.uncertain_edges:
        if parts[e.src] != parts[e.dst]:
            total += e.u * e.p
    return total


def _heavy_edge_matching(w, node_w, cap, order):
    """Pair each node with its heaviest unmatched neighbor; returns old->new map."""
    n = w.shape[0]
    match = np.full(n, -1, dtype=np.int64)
    for v in order:
        if match[v] >= 0:
            continue
        row = w[v]
        best, best_w = -1, 0.0
        for u in np.nonzero(row > 0)[0]:
            if u == v or match[u] >= 0:
                continue
            if node_w[v] + node_w[u] > cap:
                continue
            if row[u] > best_w or (row[u] == best_w and best >= 0 and u < best):
                best, best_w = int(u), float(row[u])
        if best >= 0:
            match[v] = best
            match[best] = v
        else:
            match[v] = v
    mapping = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for v in range(n):
        if mapping[v] >= 0:
            continue
        mapping[v] = nxt
        if match[v] != v:
            mapping[match[v]] = nxt
        nxt += 1
    return mapping, nxt


def _contract(w, node_w, mapping, n_new):
    w_new = np.zeros((n_new, n_new), dtype=np.float64)
    idx = mapping[:, None] * n_new + mapping[None, :]
    np.add.at(w_new.reshape(-1), idx.reshape(-1), w.reshape(-1))
    np.fill_diagonal(w_new, 0.0)
    nw_new = np.zeros(n_new, dtype=np.int64)
    np.add.at(nw_new, mapping, node_w)
    return w_new, nw_new


def _greedy_initial(w, node_w, k, cap):
    n = w.shape[0]
    parts = np.full(n, -1, dtype=np.int64)
    loads = np.zeros(k, dtype=np.int64)
    conn = np.zeros((n, k), dtype=np.float64)
    order = sorted(range(n), key=lambda v: (-node_w[v], v))
    for j, v in enumerate(order):
        fits = loads + node_w[v] <= cap
        # once only as many nodes remain as empty parts, force them apart
        empty = loads == 0
        if empty.sum() >= n - j:
            fits = fits & empty
        if not fits.any():
            fits = loads == loads.min()
        cand = np.nonzero(fits)[0]
        gains = conn[v, cand]
        best = cand[np.lexsort((cand, loads[cand], -gains))][0]
        parts[v] = best
        loads[best] += node_w[v]
        conn[:, best] += w[:, v]
    return parts


def _refine(w, node_w, parts, k, cap, max_passes=8):
    """Move/swap passes on the boundary; strictly decreases the cut."""
    n = w.shape[0]
    conn = np.zeros((n, k), dtype=np.float64)
    for p in range(k):
        conn[:, p] = w[:, parts == p].sum(axis=1)
    loads = np.zeros(k, dtype=np.int64)
    np.add.at(loads, parts, node_w)
    counts = np.bincount(parts, minlength=k)

    def apply_move(v, dst):
        src = parts[v]
        parts[v] = dst
        loads[src] -= node_w[v]
        loads[dst] += node_w[v]
        counts[src] -= 1
        counts[dst] += 1
        conn[:, src] -= w[:, v]
        conn[:, dst] += w[:, v]

    for _ in range(max_passes):
        improved = False
        for v in range(n):
            src = parts[v]
            if counts[src] <= 1:
                continue
            gains = conn[v] - conn[v, src]
            ok = loads + node_w[v] <= cap
            ok[src] = False
            if not ok.any():
                continue
            cand = np.nonzero(ok)[0]
            dst = cand[np.argmax(gains[cand])]
            if gains[dst] > 1e-12:
                apply_move(v, dst)
                improved = True
        if improved:
            continue
        # no single move helps; look for one profitable swap per pass
        best_swap, best_gain = None, 1e-12
        boundary = [v for v in range(n) if (conn[v] > 0).sum() > 1 or conn[v, parts[v]] == 0]
        for i, u in enumerate(boundary):
            pu = parts[u]
            for v in boundary[i + 1:]:
                pv = parts[v]
                if pv == pu:
                    continue
                gain = (
                    conn[u, pv] - conn[u, pu] + conn[v, pu] - conn[v, pv] - 2.0 * w[u, v]
                )
                if gain <= best_gain:
                    continue
                if loads[pv] - node_w[v] + node_w[u] > cap:
                    continue
                if loads[pu] - node_w[u] + node_w[v] > cap:
                    continue
                best_swap, best_gain = (u, v), gain
        if best_swap is None:
            break
        u, v = best_swap
        pu, pv = parts[u], parts[v]
        apply_move(u, pv)
        apply_move(v, pu)
    return parts


def partition(net, k: int, imbalance_tolerance: float = 0.1, seed: int = 0):
    """Balanced k-way partitioning minimizing the weighted edge cut.

    Deterministic for a fixed seed.  Raises ValueError when k exceeds the node
    count.
    """
    from .netcore import Partitioning

    n = net.n
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"cannot split {n} nodes into {k} parts")
    if imbalance_tolerance < 0:
        raise ValueError("imbalance_tolerance must be >= 0")
    if k == 1:
        return Partitioning(np.zeros(n, dtype=np.int64), 1)
    cap = int(math.ceil(n / k) * (1.0 + imbalance_tolerance))
    cap = max(cap, int(math.ceil(n / k)))

    rng = np.random.default_rng(seed)
    w = edge_weight_matrix(net)
    node_w = np.ones(n, dtype=np.int64)

    levels = []  # (w, node_w, mapping to next-coarser)
    target = max(4 * k, 24)
    while w.shape[0] > target:
        order = rng.permutation(w.shape[0])
        mapping, n_new = _heavy_edge_matching(w, node_w, cap, order)
        if n_new >= w.shape[0] or n_new < k:
            break
        levels.append((w, node_w, mapping))
        w, node_w = _contract(w, node_w, mapping, n_new)

    parts = _greedy_initial(w, node_w, k, cap)
    parts = _refine(w, node_w, parts, k, cap)

    while levels:
        w, node_w, mapping = levels.pop()
        parts = parts[mapping]
        parts = _refine(w, node_w, parts, k, cap)

    # guarantee non-empty parts even on degenerate weight structures
    counts = np.bincount(parts, minlength=k)
    for empty in np.nonzero(counts == 0)[0]:
        donor = int(np.argmax(counts))
        movable = np.nonzero(parts == donor)[0]
        parts[movable[-1]] = empty
        counts[donor] -= 1
        counts[empty] += 1

    return Partitioning(parts.astype(np.int64), k)
