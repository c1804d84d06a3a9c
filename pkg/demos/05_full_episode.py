"""One full episode, step by step, then a small experiment grid.

The episode loop owns the hidden ground truth; the planner sees only its
belief.  The experiment runner sweeps (planner x network x seed) cells and
writes a deterministic results CSV next to a timing file.
"""

from pathlib import Path

from dimeplan.harness import make_planner, run_episode, run_experiment


def one_episode():
    from dimeplan.netcore import load_network

    net = load_network(Path(__file__).parent / "networks" / "youth62.json")
    rec = run_episode(net, make_planner("heal", {"delta": 8}), 4, 3, 2,
                      seed=62, n_particles=256, planner_name="heal")
    for t, r in enumerate(rec.rounds, start=1):
        revealed = ", ".join(f"{e}={bit}" for e, bit in r.observation.entries[:4])
        more = "" if len(r.observation.entries) <= 4 else ", ..."
        print(f"round {t}: invite {list(r.action.nodes)}; revealed [{revealed}{more}]; "
              f"hidden spread now {r.spread_after}")
    print(f"final spread {rec.final_spread} of {net.n}\n")


def small_grid(out_dir: Path):
    cfg = {
        "experiment": {"K": 2, "T": 3, "L": 2, "episodes": 5, "seeds": [1, 2],
                       "particles": 128},
        "network": [
            {"kind": "community", "n": 24, "blocks": 4, "p_in": 0.4, "p_out": 0.02,
             "uncertain_frac": 0.4, "seed": 3, "name": "c24"},
        ],
        "planner": [
            {"name": "dc"},
            {"name": "heal", "delta": 4, "rollout_reps": 2},
        ],
    }
    report = run_experiment(cfg, out_dir)
    print("\n".join(report.summary_lines()))
    print(f"\nCSV written under {out_dir}")


def main():
    one_episode()
    small_grid(Path("/tmp/dimeplan_demo_experiment"))


if __name__ == "__main__":
    main()
