"""Command line front ends: ``net``, ``diffuse``, ``plan`` and ``dime``."""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import harness, netcore, pomdp
from .diffusion import estimate_spread, per_round_spread, stream
from .heal import heal_plan_detailed, heal_t_plan_detailed
from .psinet import PsinetConfig, VoteConfig, psinet_plan_detailed


def _parse_range(text: str) -> tuple[float, float]:
    lo, hi = (float(x) for x in text.split(","))
    return lo, hi


def _parse_nodes(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x != ""]


# -- net ------------------------------------------------------------------------


def net_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="net", description="uncertain network tools")
    sub = parser.add_subparsers(dest="cmd", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic network")
    gen.add_argument("kind", choices=["er", "ws", "community"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--edge-p", type=float, default=0.1, help="er: pair probability")
    gen.add_argument("--k-ring", type=int, default=4, help="ws: ring degree")
    gen.add_argument("--rewire-p", type=float, default=0.1, help="ws: rewiring probability")
    gen.add_argument("--blocks", type=int, default=2, help="community: block count")
    gen.add_argument("--p-in", type=float, default=0.2, help="community: within-block pair probability")
    gen.add_argument("--p-out", type=float, default=0.01, help="community: cross-block pair probability")
    gen.add_argument("--uncertain-frac", type=float, default=0.3)
    gen.add_argument("--p-range", type=_parse_range, default=(0.1, 0.5), metavar="LO,HI")
    gen.add_argument("--u-range", type=_parse_range, default=(0.3, 0.7), metavar="LO,HI")
    gen.add_argument("-o", "--out", required=True)

    part = sub.add_parser("partition", help="balanced k-way partitioning")
    part.add_argument("--net", required=True)
    part.add_argument("--k", type=int, required=True)
    part.add_argument("--tol", type=float, default=0.1)
    part.add_argument("--seed", type=int, default=0)

    stats = sub.add_parser("stats", help="summarize a network file")
    stats.add_argument("--net", required=True)

    args = parser.parse_args(argv)
    if args.cmd == "gen":
        common = dict(
            uncertain_frac=args.uncertain_frac,
            p_range=args.p_range,
            u_range=args.u_range,
            seed=args.seed,
        )
        if args.kind == "er":
            net = netcore.generate_er(args.n, args.edge_p, **common)
        elif args.kind == "ws":
            net = netcore.generate_ws(args.n, args.k_ring, args.rewire_p, **common)
        else:
            net = netcore.generate_community(
                args.n, args.blocks, args.p_in, args.p_out, **common
            )
        netcore.save_network(net, args.out)
        print(f"wrote {net!r} to {args.out}")
    elif args.cmd == "partition":
        net = netcore.load_network(args.net)
        parting = netcore.partition(net, args.k, args.tol, seed=args.seed)
        from .partitioning import cut_weight

        print(f"cut_weight {cut_weight(net, parting.parts):.4f}")
        print(f"part_sizes {' '.join(str(int(s)) for s in parting.sizes())}")
        for i in range(parting.k):
            nodes = ",".join(str(int(v)) for v in parting.part_nodes(i))
            print(f"part {i}: {nodes}")
    else:
        net = netcore.load_network(args.net)
        scores = netcore.dc_scores(net)
        print(f"nodes {net.n}")
        print(f"certain_edges {net.n_certain}")
        print(f"uncertain_edges {net.n_uncertain}")
        print(f"mean_dc_score {scores.mean():.3f}")
        top = np.argsort(-scores)[:5]
        print("top_dc_nodes " + " ".join(f"{int(v)}:{scores[v]:.2f}" for v in top))
    return 0


# -- diffuse ----------------------------------------------------------------------


def diffuse_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="diffuse", description="Monte Carlo spread estimation")
    parser.add_argument("--net", required=True)
    parser.add_argument("--seeds", type=_parse_nodes, required=True, metavar="1,5,9")
    parser.add_argument("--L", type=int, default=3)
    parser.add_argument("--sims", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--per-round-csv", default=None, help="write per-round means here")
    args = parser.parse_args(argv)

    net = netcore.load_network(args.net)
    est = estimate_spread(net, args.seeds, args.L, args.sims, stream(args.seed, 0))
    print(f"spread {est.mean:.4f} ± {est.stderr:.4f} (n={est.n_sims})")
    if args.per_round_csv:
        rounds = per_round_spread(net, args.seeds, args.L, min(args.sims, 2000), stream(args.seed, 1))
        with open(args.per_round_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "mean", "stderr"])
            for t, r in enumerate(rounds, start=1):
                writer.writerow([t, f"{r.mean:.6f}", f"{r.stderr:.6f}"])
        print(f"per-round spread written to {args.per_round_csv}")
    return 0


# -- plan -------------------------------------------------------------------------


def _load_belief(net, args) -> pomdp.Belief:
    if args.belief:
        return pomdp.load_belief(net, args.belief, args.L)
    return pomdp.initial_belief(net, args.particles, stream(args.belief_seed, 0))


def plan_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plan", description="single-round planners")
    sub = parser.add_subparsers(dest="cmd", required=True)

    ps = sub.add_parser("psinet", help="ensemble-of-instances voting planner")
    ps.add_argument("--variant", choices=["s", "w", "c"], default="w")
    ps.add_argument("--delta", type=int, default=64, help="instance count")
    ps.add_argument("--eta", type=int, default=256, help="rollouts per (instance, action)")
    ps.add_argument("--M", type=int, default=50, help="candidate pool size")
    ps.add_argument("--votes-csv", default=None, help="write the per-instance vote table here")

    hl = sub.add_parser("heal", help="partition + TASP planner")
    hl.add_argument("--variant", choices=["k", "t"], default="k")
    hl.add_argument("--delta", type=int, default=64, help="instances per partition")
    hl.add_argument("--diagnostics-csv", default=None,
                    help="write partition sizes, cut weight and reward tables here")

    for p in (ps, hl):
        p.add_argument("--net", required=True)
        p.add_argument("--belief", default=None, help="belief replay file (JSON)")
        p.add_argument("--belief-seed", type=int, default=0)
        p.add_argument("--particles", type=int, default=512)
        p.add_argument("--K", type=int, required=True)
        p.add_argument("--T", type=int, default=1, help="total rounds (sets the horizon)")
        p.add_argument("--round", type=int, default=1, help="current round index")
        p.add_argument("--L", type=int, default=3)
        p.add_argument("--seed", type=int, default=7)

    args = parser.parse_args(argv)
    net = netcore.load_network(args.net)
    belief = _load_belief(net, args)
    horizon = args.T - args.round + 1
    if horizon < 1:
        parser.error("--round must not exceed --T")

    if args.cmd == "psinet":
        cfg = PsinetConfig(
            k=args.K,
            horizon=horizon,
            steps=args.L,
            vote=VoteConfig(
                variant=args.variant.upper(),
                n_instances=args.delta,
                eta=args.eta,
                pool_size=args.M,
            ),
        )
        action, votes, kepts = psinet_plan_detailed(net, belief, cfg, stream(args.seed, 0))
        print(f"action {','.join(str(v) for v in action.nodes)}")
        if args.votes_csv:
            with open(args.votes_csv, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["instance", "removed_edges", "best_value", "top_action"])
                for v, kept in zip(votes, kepts):
                    writer.writerow(
                        [
                            v.instance_index,
                            int(len(kept) - kept.sum()),
                            f"{v.best_value:.4f}",
                            "|".join(str(x) for x in v.ranking[0].nodes),
                        ]
                    )
            print(f"vote table written to {args.votes_csv}")
    else:
        fn = heal_plan_detailed if args.variant == "k" else heal_t_plan_detailed
        action, diags = fn(
            net, belief, args.K, args.T, args.L, args.round,
            delta=args.delta, rng=stream(args.seed, 0),
        )
        print(f"action {','.join(str(v) for v in action.nodes)}")
        print(f"partition_sizes {' '.join(str(s) for s in diags['partition_sizes'])}")
        print(f"cut_weight {diags['cut_weight']:.4f}")
        if args.diagnostics_csv:
            with open(args.diagnostics_csv, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["part", "size", "eligible", "budget", "pick_index",
                                 "candidate_node", "expected_reward", "picked"])
                for part in diags["parts"]:
                    for pick_i, table in enumerate(part["tables"]):
                        for node, reward in table:
                            writer.writerow([
                                part["part"], part["size"], part["eligible"],
                                part["budget"], pick_i, node, f"{reward:.4f}",
                                int(node in part["picked"]),
                            ])
            print(f"diagnostics written to {args.diagnostics_csv}")
    return 0


# -- dime -------------------------------------------------------------------------


def dime_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dime", description="episodes, experiments, diagnostics")
    sub = parser.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="output directory for CSV + summary")

    ep = sub.add_parser("episode", help="play one episode")
    ep.add_argument("--planner", required=True, choices=harness.PLANNER_NAMES)
    ep.add_argument("--net", required=True)
    ep.add_argument("--K", type=int, required=True)
    ep.add_argument("--T", type=int, required=True)
    ep.add_argument("--L", type=int, default=3)
    ep.add_argument("--seed", type=int, default=1)
    ep.add_argument("--particles", type=int, default=512)
    ep.add_argument("--out", default=None, help="write the episode record here")

    cx = sub.add_parser("counterexample", help="search for an adaptivity violation")
    cx.add_argument("--budget", type=int, default=10_000)
    cx.add_argument("--seed", type=int, default=1)

    args = parser.parse_args(argv)
    if args.cmd == "run":
        report = harness.run_experiment(args.config, args.out)
        print("\n".join(report.summary_lines()))
    elif args.cmd == "episode":
        net = netcore.load_network(args.net)
        planner = harness.make_planner(args.planner)
        rec = harness.run_episode(
            net, planner, args.K, args.T, args.L,
            seed=args.seed, n_particles=args.particles, planner_name=args.planner,
        )
        for t, r in enumerate(rec.rounds, start=1):
            acts = ",".join(str(v) for v in r.action.nodes)
            obs = " ".join(f"{e}={bit}" for e, bit in r.observation.entries)
            print(f"round {t}: action [{acts}] observed [{obs}] spread {r.spread_after}")
        print(f"final_spread {rec.final_spread}")
        if args.out:
            harness.save_episode(rec, args.out)
            print(f"episode record written to {args.out}")
    else:
        witness = harness.find_adasub_counterexample(args.budget, stream(args.seed, 0))
        if witness is None:
            print("no witness found within budget")
            return 1
        print("witness found and verified:")
        print(f"  network: {witness.network!r}")
        print(f"  node: {witness.node}")
        print(f"  base history: {witness.base_history}")
        print(f"  extended history: {witness.extended_history}")
        print(f"  marginal gain: {witness.marginal_base:.6f} -> {witness.marginal_extended:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(dime_main())
