"""Reward curves on 4x4x2 toy problems with three nets, one CSV column per seed."""

import argparse
import csv
from pathlib import Path

from drlroute import GenSpec, TrainConfig, generate, train


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--episodes", type=int, default=2000)
    ap.add_argument("--gamma", type=float, default=0.9)
    ap.add_argument("--out", type=Path, default=Path("results/toy_rewards.csv"))
    args = ap.parse_args()

    curves = []
    for seed in range(args.seeds):
        p = generate(GenSpec(width=4, height=4, net_count=3, normal_capacity=3, seed=seed))[0]
        r = train(p, TrainConfig(gamma=args.gamma, max_episodes=args.episodes, seed=seed))
        curves.append(r.rewards)
        print(f"seed {seed}: {int(r.solved[-100:].sum())}/100 final episodes fully solved, best WL {r.best_wl}")

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["episode"] + [f"seed{s}" for s in range(args.seeds)])
        for ep in range(args.episodes):
            w.writerow([ep + 1] + [f"{c[ep]:g}" for c in curves])


if __name__ == "__main__":
    main()
