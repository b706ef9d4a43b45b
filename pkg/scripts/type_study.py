"""How often A* leaves a problem Type II as the net count grows.

Writes one row per (net count, problem) with A* WL, OF and type, and
optionally the heatmap/histogram CSVs of each A* solution.
"""

import argparse
import csv
from pathlib import Path

from drlroute import GenSpec, classify, generate, overflow, route_problem, wirelength
from drlroute.generator import edge_utilization, heatmap_csv, histogram_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nets", type=int, nargs="+", default=[10, 20, 30, 40, 50, 60])
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--cap", type=int, default=5)
    ap.add_argument("--reduce", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--heatmaps", type=Path, help="directory for per-problem utilization CSVs")
    ap.add_argument("--out", type=Path, default=Path("results/type_study.csv"))
    args = ap.parse_args()

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["nets", "problem", "astar_wl", "astar_of", "type"])
        for n in args.nets:
            problems = generate(GenSpec(problem_count=args.count, net_count=n, normal_capacity=args.cap,
                                        reduced_edge_count=args.reduce, seed=args.seed + n))
            type2 = 0
            for i, p in enumerate(problems):
                sol, _ = route_problem(p)
                kind = classify(p, sol)
                type2 += kind.value == "TypeII"
                w.writerow([n, i, wirelength(sol), overflow(p, sol), kind.value])
                if args.heatmaps:
                    args.heatmaps.mkdir(parents=True, exist_ok=True)
                    util = edge_utilization(p, sol)
                    (args.heatmaps / f"n{n}_{i:03d}.heat.csv").write_text(heatmap_csv(util))
                    (args.heatmaps / f"n{n}_{i:03d}.hist.csv").write_text(histogram_csv(util))
            print(f"{n} nets: {type2}/{args.count} Type II")


if __name__ == "__main__":
    main()
