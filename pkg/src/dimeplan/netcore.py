"""Uncertain-network data model, synthetic generators, sampling and serialization.

A network is a directed graph whose edge set splits into *certain* edges
(friendships we definitely know about) and *uncertain* edges that exist only
with some probability ``u(e)``.  Every edge additionally carries a propagation
probability ``p(e)`` used by the cascade simulator.

Edge ids are dense and positional: certain edges occupy ids ``0 .. C-1`` in
declaration order, uncertain edges occupy ids ``C .. M-1``.  The position of an
uncertain edge inside the uncertain block is its existence-bit index, so bit
``i`` of any existence vector always refers to ``uncertain_edges[i]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

FILE_FORMAT_VERSION = 1


class NetworkFormatError(ValueError):
    """Raised when a network file cannot be parsed or fails validation."""


@dataclass(frozen=True)
class Edge:
    """A directed edge. ``u`` is the existence probability, None for certain edges."""

    id: int
    src: int
    dst: int
    p: float
    u: float | None = None

    @property
    def is_uncertain(self) -> bool:
        return self.u is not None


class UncertainNetwork:
    """Immutable directed graph with certain and uncertain edge blocks.

    Construction validates node ranges, probability ranges, self loops and
    duplicate directed pairs, then freezes everything into numpy views used by
    the simulator:

    - ``edge_src``, ``edge_dst``, ``edge_p``: arrays over all M edges in id order
    - ``uncertain_u``: existence probabilities, one per uncertain edge
    """

    def __init__(
        self,
        n_nodes: int,
        certain_edges: Iterable[tuple[int, int, float]],
        uncertain_edges: Iterable[tuple[int, int, float, float]],
        name: str = "",
        node_labels: Sequence[str] | None = None,
    ):
        if n_nodes < 1:
            raise NetworkFormatError("network needs at least one node")
        self.n = int(n_nodes)
        self.name = name
        if node_labels is not None:
            node_labels = tuple(str(s) for s in node_labels)
            if len(node_labels) != self.n:
                raise NetworkFormatError(
                    f"node_labels has {len(node_labels)} entries for {self.n} nodes"
                )
        self.node_labels = node_labels

        certain: list[Edge] = []
        uncertain: list[Edge] = []
        seen: set[tuple[int, int]] = set()

        def check_endpoint(v, what, where):
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise NetworkFormatError(f"{where}: {what} must be an integer, got {v!r}")
            if not 0 <= v < self.n:
                raise NetworkFormatError(f"{where}: {what}={v} outside [0, {self.n})")

        for i, (src, dst, p) in enumerate(certain_edges):
            where = f"certain_edges[{i}]"
            check_endpoint(src, "src", where)
            check_endpoint(dst, "dst", where)
            if src == dst:
                raise NetworkFormatError(f"{where}: self loop at node {src}")
            if not 0.0 <= p <= 1.0:
                raise NetworkFormatError(f"{where}: p={p} outside [0, 1]")
            if (src, dst) in seen:
                raise NetworkFormatError(f"{where}: duplicate directed edge ({src}, {dst})")
            seen.add((src, dst))
            certain.append(Edge(len(certain), int(src), int(dst), float(p)))

        base = len(certain)
        for i, (src, dst, p, u) in enumerate(uncertain_edges):
            where = f"uncertain_edges[{i}]"
            check_endpoint(src, "src", where)
            check_endpoint(dst, "dst", where)
            if src == dst:
                raise NetworkFormatError(f"{where}: self loop at node {src}")
            if not 0.0 <= p <= 1.0:
                raise NetworkFormatError(f"{where}: p={p} outside [0, 1]")
            if not 0.0 < u < 1.0:
                raise NetworkFormatError(
                    f"{where}: u={u} must lie strictly between 0 and 1"
                )
            if (src, dst) in seen:
                raise NetworkFormatError(f"{where}: duplicate directed edge ({src}, {dst})")
            seen.add((src, dst))
            uncertain.append(Edge(base + len(uncertain), int(src), int(dst), float(p), float(u)))

        self.certain_edges: tuple[Edge, ...] = tuple(certain)
        self.uncertain_edges: tuple[Edge, ...] = tuple(uncertain)

        all_edges = self.certain_edges + self.uncertain_edges
        self.edge_src = np.array([e.src for e in all_edges], dtype=np.int64)
        self.edge_dst = np.array([e.dst for e in all_edges], dtype=np.int64)
        self.edge_p = np.array([e.p for e in all_edges], dtype=np.float64)
        self.uncertain_u = np.array([e.u for e in self.uncertain_edges], dtype=np.float64)
        for a in (self.edge_src, self.edge_dst, self.edge_p, self.uncertain_u):
            a.setflags(write=False)

        # uncertain out-edge ids per source node, ascending; drives observations
        by_src: dict[int, list[int]] = {}
        for e in self.uncertain_edges:
            by_src.setdefault(e.src, []).append(e.id)
        self._uncertain_out: dict[int, tuple[int, ...]] = {
            v: tuple(sorted(ids)) for v, ids in by_src.items()
        }

    # -- basic shape ---------------------------------------------------------

    @property
    def n_certain(self) -> int:
        return len(self.certain_edges)

    @property
    def n_uncertain(self) -> int:
        return len(self.uncertain_edges)

    @property
    def m(self) -> int:
        return self.n_certain + self.n_uncertain

    def edges(self) -> tuple[Edge, ...]:
        return self.certain_edges + self.uncertain_edges

    def uncertain_out_ids(self, node: int) -> tuple[int, ...]:
        """Ids of uncertain edges leaving ``node``, ascending."""
        return self._uncertain_out.get(node, ())

    def f_index(self, edge_id: int) -> int:
        """Existence-bit index of an uncertain edge id."""
        i = edge_id - self.n_certain
        if not 0 <= i < self.n_uncertain:
            raise KeyError(f"edge id {edge_id} is not an uncertain edge")
        return i

    def __eq__(self, other) -> bool:
        if not isinstance(other, UncertainNetwork):
            return NotImplemented
        return (
            self.n == other.n
            and self.node_labels == other.node_labels
            and self.certain_edges == other.certain_edges
            and self.uncertain_edges == other.uncertain_edges
        )

    def __repr__(self) -> str:
        return (
            f"UncertainNetwork(n={self.n}, certain={self.n_certain}, "
            f"uncertain={self.n_uncertain}, name={self.name!r})"
        )


@dataclass(frozen=True)
class InstantiatedNetwork:
    """A fully resolved draw of the uncertain edges: ``kept[i]`` keeps edge bit i."""

    base: UncertainNetwork
    kept: np.ndarray  # bool, length n_uncertain

    def __post_init__(self):
        kept = np.asarray(self.kept, dtype=bool)
        if kept.shape != (self.base.n_uncertain,):
            raise ValueError(
                f"kept has shape {kept.shape}, expected ({self.base.n_uncertain},)"
            )
        kept = kept.copy()
        kept.setflags(write=False)
        object.__setattr__(self, "kept", kept)

    def active_mask(self) -> np.ndarray:
        """Boolean mask over all edge ids: certain edges always on."""
        return np.concatenate(
            [np.ones(self.base.n_certain, dtype=bool), self.kept]
        )


@dataclass(frozen=True)
class Partitioning:
    """Assignment of every node to one of ``k`` parts."""

    parts: np.ndarray  # int, length N, values in [0, k)
    k: int

    def __post_init__(self):
        parts = np.asarray(self.parts, dtype=np.int64).copy()
        parts.setflags(write=False)
        object.__setattr__(self, "parts", parts)
        if self.k < 1:
            raise ValueError("k must be positive")
        if parts.min(initial=0) < 0 or (parts.max(initial=0) >= self.k):
            raise ValueError("part index out of range")
        sizes = np.bincount(parts, minlength=self.k)
        if (sizes == 0).any():
            raise ValueError("every part must be non-empty")

    def part_nodes(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.parts == i)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.parts, minlength=self.k)


# -- serialization -----------------------------------------------------------


def network_to_dict(net: UncertainNetwork) -> dict:
    doc = {
        "version": FILE_FORMAT_VERSION,
        "name": net.name,
        "n_nodes": net.n,
        "certain_edges": [
            {"src": e.src, "dst": e.dst, "p": e.p} for e in net.certain_edges
        ],
        "uncertain_edges": [
            {"src": e.src, "dst": e.dst, "p": e.p, "u": e.u}
            for e in net.uncertain_edges
        ],
    }
    if net.node_labels is not None:
        doc["node_labels"] = list(net.node_labels)
    return doc


def network_from_dict(doc: Mapping, name_hint: str = "") -> UncertainNetwork:
    if not isinstance(doc, Mapping):
        raise NetworkFormatError("top level must be an object")
    version = doc.get("version")
    if version != FILE_FORMAT_VERSION:
        raise NetworkFormatError(f"unsupported version {version!r}")
    try:
        n_nodes = doc["n_nodes"]
    except KeyError:
        raise NetworkFormatError("missing field n_nodes") from None

    def pull(entry, keys, where):
        if not isinstance(entry, Mapping):
            raise NetworkFormatError(f"{where}: expected an object")
        out = []
        for k in keys:
            if k not in entry:
                raise NetworkFormatError(f"{where}: missing field {k!r}")
            out.append(entry[k])
        return out

    certain = [
        tuple(pull(e, ("src", "dst", "p"), f"certain_edges[{i}]"))
        for i, e in enumerate(doc.get("certain_edges", []))
    ]
    uncertain = [
        tuple(pull(e, ("src", "dst", "p", "u"), f"uncertain_edges[{i}]"))
        for i, e in enumerate(doc.get("uncertain_edges", []))
    ]
    return UncertainNetwork(
        n_nodes,
        certain,
        uncertain,
        name=doc.get("name", name_hint),
        node_labels=doc.get("node_labels"),
    )


def load_network(path: str | Path) -> UncertainNetwork:
    """Load a network from its JSON file format.

    Array order in the file is normative: the i-th entry of ``uncertain_edges``
    is existence bit i forever after.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise NetworkFormatError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return network_from_dict(doc, name_hint=path.stem)


def save_network(net: UncertainNetwork, path: str | Path) -> None:
    """Write a network so that ``load_network`` reproduces it field for field."""
    path = Path(path)
    path.write_text(json.dumps(network_to_dict(net), indent=1) + "\n")


# -- generators --------------------------------------------------------------


def _assign_uncertainty(
    pairs: list[tuple[int, int]],
    uncertain_frac: float,
    p_range: tuple[float, float],
    u_range: tuple[float, float],
    rng: np.random.Generator,
) -> tuple[list, list]:
    """Split directed pairs into certain/uncertain blocks with sampled p and u."""
    if not 0.0 <= uncertain_frac <= 1.0:
        raise ValueError("uncertain_frac must be in [0, 1]")
    p_lo, p_hi = p_range
    u_lo, u_hi = u_range
    if not 0.0 <= p_lo <= p_hi <= 1.0:
        raise ValueError("p_range must satisfy 0 <= lo <= hi <= 1")
    if not 0.0 < u_lo <= u_hi < 1.0:
        raise ValueError("u_range must lie strictly inside (0, 1)")

    m = len(pairs)
    n_unc = int(round(uncertain_frac * m))
    unc_idx = set(rng.choice(m, size=n_unc, replace=False).tolist()) if n_unc else set()
    ps = rng.uniform(p_lo, p_hi, size=m)
    us = rng.uniform(u_lo, u_hi, size=m)

    certain, uncertain = [], []
    for i, (s, d) in enumerate(pairs):
        if i in unc_idx:
            uncertain.append((s, d, float(ps[i]), float(us[i])))
        else:
            certain.append((s, d, float(ps[i])))
    return certain, uncertain


def generate_er(
    n: int,
    edge_p: float,
    uncertain_frac: float = 0.0,
    p_range: tuple[float, float] = (0.1, 0.5),
    u_range: tuple[float, float] = (0.3, 0.7),
    seed: int = 0,
) -> UncertainNetwork:
    """Directed Erdos-Renyi graph: each ordered pair appears independently."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= edge_p <= 1.0:
        raise ValueError("edge_p must be in [0, 1]")
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < edge_p
    np.fill_diagonal(mask, False)
    pairs = [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]
    certain, uncertain = _assign_uncertainty(pairs, uncertain_frac, p_range, u_range, rng)
    return UncertainNetwork(n, certain, uncertain, name=f"er-{n}-{seed}")


def generate_ws(
    n: int,
    k_ring: int,
    rewire_p: float,
    uncertain_frac: float = 0.0,
    p_range: tuple[float, float] = (0.1, 0.5),
    u_range: tuple[float, float] = (0.3, 0.7),
    seed: int = 0,
) -> UncertainNetwork:
    """Watts-Strogatz small world; each undirected tie becomes two directed edges."""
    if k_ring % 2 != 0:
        raise ValueError("k_ring must be even")
    if not 0 < k_ring < n:
        raise ValueError("k_ring must satisfy 0 < k_ring < n")
    if not 0.0 <= rewire_p <= 1.0:
        raise ValueError("rewire_p must be in [0, 1]")
    rng = np.random.default_rng(seed)

    ties: set[tuple[int, int]] = set()
    for i in range(n):
        for off in range(1, k_ring // 2 + 1):
            j = (i + off) % n
            ties.add((min(i, j), max(i, j)))
    tie_list = sorted(ties)
    # standard rewiring pass: clockwise ties in ring order
    for i in range(n):
        for off in range(1, k_ring // 2 + 1):
            j = (i + off) % n
            key = (min(i, j), max(i, j))
            if key not in ties or rng.random() >= rewire_p:
                continue
            choices = [
                v for v in range(n)
                if v != i and (min(i, v), max(i, v)) not in ties
            ]
            if not choices:
                continue
            v = choices[rng.integers(len(choices))]
            ties.remove(key)
            ties.add((min(i, v), max(i, v)))
    pairs = []
    for a, b in sorted(ties):
        pairs.append((a, b))
        pairs.append((b, a))
    certain, uncertain = _assign_uncertainty(pairs, uncertain_frac, p_range, u_range, rng)
    return UncertainNetwork(n, certain, uncertain, name=f"ws-{n}-{seed}")


def generate_two_level(
    n: int,
    communities: int = 2,
    group_sizes: Sequence[int] = (15, 12, 9, 9, 6, 6, 6, 4, 4, 4),
    p_group: float = 0.6,
    p_background: float = 0.006,
    p_cross: float = 0.0015,
    uncertain_frac: float = 0.0,
    p_range: tuple[float, float] = (0.1, 0.5),
    u_range: tuple[float, float] = (0.3, 0.7),
    seed: int = 0,
) -> UncertainNetwork:
    """Two-level community graph: tight friend groups nested inside communities.

    Group sizes cycle through ``group_sizes`` (a heavy-tailed pattern by
    default) within each equal-size community, so degree mass concentrates in
    a few large groups the way it does in real contact networks.  Pair
    probability is ``p_group`` inside a group, ``p_background`` inside a
    community and ``p_cross`` across communities.
    """
    if communities < 1 or communities > n:
        raise ValueError("communities must be in [1, n]")
    if not p_group >= p_background >= p_cross >= 0:
        raise ValueError("need p_group >= p_background >= p_cross >= 0")
    rng = np.random.default_rng(seed)
    comm_of = np.array([v * communities // n for v in range(n)])
    group_of = np.empty(n, dtype=np.int64)
    gid = 0
    v = 0
    for c in range(communities):
        size = int((comm_of == c).sum())
        filled = 0
        pattern = 0
        while filled < size:
            g = min(group_sizes[pattern % len(group_sizes)], size - filled)
            group_of[v : v + g] = gid
            gid += 1
            v += g
            filled += g
            pattern += 1
    prob = np.where(
        group_of[:, None] == group_of[None, :],
        p_group,
        np.where(comm_of[:, None] == comm_of[None, :], p_background, p_cross),
    )
    mask = rng.random((n, n)) < prob
    np.fill_diagonal(mask, False)
    pairs = [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]
    certain, uncertain = _assign_uncertainty(pairs, uncertain_frac, p_range, u_range, rng)
    return UncertainNetwork(
        n, certain, uncertain, name=f"twolevel-{n}x{communities}-{seed}"
    )


def generate_community(
    n: int,
    blocks: int,
    p_in: float,
    p_out: float,
    uncertain_frac: float = 0.0,
    p_range: tuple[float, float] = (0.1, 0.5),
    u_range: tuple[float, float] = (0.3, 0.7),
    seed: int = 0,
) -> UncertainNetwork:
    """Stochastic block graph: dense within equal-size blocks, sparse across."""
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    if blocks > n:
        raise ValueError("more blocks than nodes")
    if p_in < p_out:
        raise ValueError("p_in must be >= p_out")
    for name, p in (("p_in", p_in), ("p_out", p_out)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must be in [0, 1]")
    rng = np.random.default_rng(seed)
    block_of = np.array([i * blocks // n for i in range(n)])
    prob = np.where(block_of[:, None] == block_of[None, :], p_in, p_out)
    mask = rng.random((n, n)) < prob
    np.fill_diagonal(mask, False)
    pairs = [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]
    certain, uncertain = _assign_uncertainty(pairs, uncertain_frac, p_range, u_range, rng)
    return UncertainNetwork(n, certain, uncertain, name=f"community-{n}x{blocks}-{seed}")


# -- sampling and scores -----------------------------------------------------


def sample_instance(net: UncertainNetwork, rng: np.random.Generator) -> InstantiatedNetwork:
    """Keep each uncertain edge independently with its existence probability."""
    kept = rng.random(net.n_uncertain) < net.uncertain_u
    return InstantiatedNetwork(net, kept)


def f_vector_probability(u: np.ndarray, f: np.ndarray) -> float:
    """Probability of one existence vector under independent edge priors.

    Accumulated in log space; degenerate priors (0 or 1) are tolerated and give
    probability 0 for the contradicting assignments.
    """
    u = np.asarray(u, dtype=np.float64)
    f = np.asarray(f, dtype=bool)
    if u.shape != f.shape:
        raise ValueError("u and f must have the same length")
    terms = np.where(f, u, 1.0 - u)
    if (terms == 0.0).any():
        return 0.0
    return float(np.exp(np.log(terms).sum()))


def instance_probability(net: UncertainNetwork, f: np.ndarray) -> float:
    """Prior probability that the uncertain edges resolve exactly to ``f``."""
    f = np.asarray(f, dtype=bool)
    if f.shape != (net.n_uncertain,):
        raise ValueError(
            f"f has shape {f.shape}, expected ({net.n_uncertain},)"
        )
    return f_vector_probability(net.uncertain_u, f)


def dc_scores(net: UncertainNetwork) -> np.ndarray:
    """Degree-centrality scores: certain out-edges count 1, uncertain count u(e)."""
    scores = np.zeros(net.n, dtype=np.float64)
    for e in net.certain_edges:
        scores[e.src] += 1.0
    for e in net.uncertain_edges:
        scores[e.src] += e.u
    return scores


def apply_observations(
    net: UncertainNetwork, known_edges: Mapping[int, int]
) -> UncertainNetwork:
    """Resolve observed uncertain edges: present ones become certain, absent ones drop.

    Ids shift (ids are positional), so the result is a planning view, not a
    replacement for the original network the observations were taken in.
    """
    certain = [(e.src, e.dst, e.p) for e in net.certain_edges]
    uncertain = []
    for e in net.uncertain_edges:
        bit = known_edges.get(e.id)
        if bit is None:
            uncertain.append((e.src, e.dst, e.p, e.u))
        elif bit:
            certain.append((e.src, e.dst, e.p))
    return UncertainNetwork(
        net.n, certain, uncertain, name=net.name, node_labels=net.node_labels
    )


def induced_subnetwork(
    net: UncertainNetwork, nodes: Sequence[int]
) -> tuple[UncertainNetwork, np.ndarray]:
    """Subnetwork on ``nodes`` keeping only internal edges.

    Returns the subnetwork (nodes relabelled 0..len(nodes)-1 in the given
    order) and the array of global node ids so actions can be mapped back.
    """
    nodes = np.asarray(sorted(int(v) for v in nodes), dtype=np.int64)
    index = {int(v): i for i, v in enumerate(nodes)}
    certain = [
        (index[e.src], index[e.dst], e.p)
        for e in net.certain_edges
        if e.src in index and e.dst in index
    ]
    uncertain = [
        (index[e.src], index[e.dst], e.p, e.u)
        for e in net.uncertain_edges
        if e.src in index and e.dst in index
    ]
    labels = None
    if net.node_labels is not None:
        labels = [net.node_labels[v] for v in nodes]
    sub = UncertainNetwork(
        len(nodes), certain, uncertain, name=f"{net.name}/sub", node_labels=labels
    )
    return sub, nodes


from .partitioning import partition  # noqa: E402  (re-export, keeps one op namespace)

__all__ = [
    "Edge",
    "UncertainNetwork",
    "InstantiatedNetwork",
    "Partitioning",
    "NetworkFormatError",
    "load_network",
    "save_network",
    "network_to_dict",
    "network_from_dict",
    "generate_er",
    "generate_ws",
    "generate_community",
    "generate_two_level",
    "sample_instance",
    "instance_probability",
    "f_vector_probability",
    "dc_scores",
    "apply_observations",
    "induced_subnetwork",
    "partition",
]
