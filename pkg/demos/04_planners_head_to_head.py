"""Planners head to head on one uncertain network.

Degree centrality is the field's default; the sampling planners pay for
their extra computation with spread, especially once picks start to overlap.
"""

import numpy as np

from dimeplan.harness import make_planner, run_episode
from dimeplan.netcore import generate_community


def main():
    net = generate_community(
        30, 6, 0.5, 0.01, uncertain_frac=0.4,
        p_range=(0.15, 0.4), u_range=(0.2, 0.8), seed=100,
    )
    print(f"{net.name}: {net.n} nodes, {net.m} edges "
          f"({net.n_uncertain} uncertain), K=2, T=3, L=3\n")

    planners = [
        ("dc", {}),
        ("random", {}),
        ("greedy", {"n_sims": 48}),
        ("psinet_w", {"delta": 16, "eta": 128, "pool": 20}),
        ("heal", {"delta": 8, "rollout_reps": 2}),
        ("heal_t", {"delta": 8, "rollout_reps": 2}),
    ]
    for name, params in planners:
        planner = make_planner(name, params)
        spreads = []
        for ep in range(15):
            rec = run_episode(net, planner, 2, 3, 3, seed=(1, ep),
                              n_particles=256, planner_name=name)
            spreads.append(rec.final_spread)
        print(f"{name:10s} mean spread {np.mean(spreads):5.2f} "
              f"± {np.std(spreads) / np.sqrt(len(spreads)):.2f}")


if __name__ == "__main__":
    main()
