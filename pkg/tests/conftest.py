import numpy as np
import pytest

from dimeplan.netcore import UncertainNetwork


@pytest.fixture
def demo6() -> UncertainNetwork:
    """Six labelled nodes, 3 certain + 4 uncertain edges; the uncertain edges
    leaving B and C carry ids 4 and 5."""
    return UncertainNetwork(
        6,
        certain_edges=[(0, 1, 0.6), (0, 2, 0.5), (3, 4, 0.7)],
        uncertain_edges=[
            (4, 5, 0.5, 0.6),   # id 3
            (1, 4, 0.8, 0.75),  # id 4
            (2, 5, 0.7, 0.5),   # id 5
            (3, 0, 0.4, 0.4),   # id 6
        ],
        name="demo6",
        node_labels=["A", "B", "C", "D", "E", "F"],
    )


@pytest.fixture
def path3() -> UncertainNetwork:
    """A -> B -> C with certain p=0.5 edges."""
    return UncertainNetwork(3, [(0, 1, 0.5), (1, 2, 0.5)], [], name="path3")


@pytest.fixture
def two_cliques() -> UncertainNetwork:
    """Two disconnected 10-node directed cliques."""
    edges = []
    for base in (0, 10):
        for i in range(10):
            for j in range(10):
                if i != j:
                    edges.append((base + i, base + j, 0.5))
    return UncertainNetwork(20, edges, [], name="two-cliques")


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)
