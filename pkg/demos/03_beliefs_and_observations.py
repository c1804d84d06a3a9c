"""Beliefs: what the planner knows between interventions.

Choosing nodes reveals the true existence bits of their outgoing suspected
friendships; everything else stays a distribution.  Beliefs clamp the
observed bits exactly and keep a particle cloud for the influence state,
which is never observed directly.
"""

from pathlib import Path

import numpy as np

from dimeplan.diffusion import stream
from dimeplan.netcore import load_network
from dimeplan.pomdp import (
    Action,
    Observation,
    belief_update,
    initial_belief,
    observed_edge_set,
)

NET = Path(__file__).parent / "networks" / "demo6.json"


def main():
    net = load_network(NET)
    labels = net.node_labels
    b = initial_belief(net, 4096, stream(0, 0))
    print(f"{net.name}: marginal existence beliefs "
          f"{np.round(b.f_marginals(), 2).tolist()}")

    action = Action([1, 2])  # invite B and C
    theta = observed_edge_set(action, net)
    print(f"inviting {[labels[v] for v in action.nodes]} will reveal edge ids {list(theta)}")

    # suppose B's tie exists and C's does not
    obs = Observation([(theta[0], 1), (theta[1], 0)])
    b2 = belief_update(b, action, obs, 2, stream(0, 1))
    print("known edges after the round:", b2.known_edges)
    print("posterior marginals:", np.round(b2.f_marginals(), 2).tolist())
    print(f"estimated people reached so far: {b2.mean_spread():.2f}")
    print("nodes certainly influenced:",
          [labels[v] for v in sorted(b2.chosen_nodes())])


if __name__ == "__main__":
    main()
