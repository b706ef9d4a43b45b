"""Win rate of DQN over A* across a grid of discount factors and burn-in modes.

    python scripts/gamma_sweep.py --count 10 --episodes 2000 --out results/gamma.csv
"""

import argparse
import csv
import itertools
import time
from pathlib import Path

from drlroute import GenSpec, TrainConfig, classify, generate, overflow, route_problem, train, wirelength


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--nets", type=int, default=50)
    ap.add_argument("--cap", type=int, default=5)
    ap.add_argument("--reduce", type=int, default=3)
    ap.add_argument("--episodes", type=int, default=2000)
    ap.add_argument("--gammas", type=float, nargs="+", default=[1.0, 0.95, 0.9, 0.8])
    ap.add_argument("--burn-in", nargs="+", default=["astar"], choices=["astar", "random"])
    ap.add_argument("--greedy-every", type=int, default=0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/gamma_sweep.csv"))
    args = ap.parse_args()

    problems = generate(GenSpec(problem_count=args.count, net_count=args.nets, normal_capacity=args.cap,
                                reduced_edge_count=args.reduce, seed=args.seed))
    baselines = [route_problem(p)[0] for p in problems]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["gamma", "burn_in", "problem", "type", "astar_wl", "astar_of", "dqn_wl", "dqn_of", "dqn_wins"])
        for gamma, mode in itertools.product(args.gammas, args.burn_in):
            wins = 0
            for i, (p, a) in enumerate(zip(problems, baselines)):
                t0 = time.time()
                cfg = TrainConfig(gamma=gamma, burn_in_mode=mode, max_episodes=args.episodes,
                                  greedy_every=args.greedy_every, seed=i)
                sol = train(p, cfg).best_solution
                key_a = (overflow(p, a), wirelength(a))
                key_b = None if sol is None else (overflow(p, sol), wirelength(sol))
                win = key_b is not None and key_b < key_a
                wins += win
                w.writerow([gamma, mode, i, classify(p, a).value, key_a[1], key_a[0],
                            "" if key_b is None else key_b[1], "" if key_b is None else key_b[0], int(win)])
                fh.flush()
                print(f"gamma {gamma} {mode} problem {i}: A* {key_a} DQN {key_b} ({time.time() - t0:.0f}s)")
            print(f"gamma {gamma} {mode}: win rate {wins / len(problems):.2f}")


if __name__ == "__main__":
    main()
