"""Command-line entry point: ``drlroute generate | route | compare``.

Exit codes: 0 when everything routed, 2 when some problem had no feasible
DQN episode (or failed), 1 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .astar import Unreachable, route_problem
from .dqn import TrainConfig, reward_curve_csv, train
from .evaluate import ProblemType, check_connectivity, classify, compare, report
from .generator import GenSpec, generate, write_problem_set
from .problem_io import ParseError, parse_problem, write_solution

log = logging.getLogger("drlroute")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be positive")
    return w, h


def _add_dqn_flags(p: argparse.ArgumentParser) -> None:
    d = TrainConfig()
    g = p.add_argument_group("DQN")
    g.add_argument("--episodes", type=int, default=d.max_episodes)
    g.add_argument("--t-max", type=int, default=d.t_max)
    g.add_argument("--gamma", type=float, default=d.gamma)
    g.add_argument("--epsilon", type=float, default=d.epsilon)
    g.add_argument("--lr", type=float, default=d.learning_rate)
    g.add_argument("--batch-size", type=int, default=d.batch_size)
    g.add_argument("--buffer-size", type=int, default=d.buffer_size)
    g.add_argument("--burn-in", choices=("astar", "random"), default=d.burn_in_mode)
    g.add_argument("--burn-in-size", type=int, default=d.burn_in_size)
    g.add_argument("--optimizer", choices=("adam", "sgd"), default=d.optimizer)
    g.add_argument("--epsilon-decay", action="store_true",
                   help="decay eps linearly to 0.01, starting at episode 2000")
    g.add_argument("--greedy-every", type=int, default=d.greedy_every,
                   help="also score an eps=0 rollout every N episodes (0 disables)")
    g.add_argument("--seed", type=int, default=d.seed)


def train_config(args) -> TrainConfig:
    cfg = TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch_size,
        buffer_size=args.buffer_size,
        burn_in_size=args.burn_in_size,
        gamma=args.gamma,
        epsilon=args.epsilon,
        max_episodes=args.episodes,
        t_max=args.t_max,
        burn_in_mode=args.burn_in,
        seed=args.seed,
        optimizer=args.optimizer,
        greedy_every=args.greedy_every,
        epsilon_decay=args.epsilon_decay,
    )
    try:
        cfg.validate()
    except ValueError as e:
        raise UsageError(str(e)) from None
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="drlroute", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write random problem files")
    g.add_argument("--grid", type=parse_grid, default=(8, 8), metavar="WxH")
    g.add_argument("--nets", type=int, default=50)
    g.add_argument("--max-pins", type=int, default=2)
    g.add_argument("--cap", type=int, default=3)
    g.add_argument("--reduce", type=int, default=0, help="number of congested edges to reduce")
    g.add_argument("--reduced-value", type=int, default=1)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--heatmaps", action="store_true", help="also write A* utilization CSVs")

    r = sub.add_parser("route", help="route one problem file")
    r.add_argument("--solver", choices=("astar", "dqn"), required=True)
    r.add_argument("--problem", type=Path, required=True)
    r.add_argument("--out", type=Path, help="output directory (default: next to the problem)")
    _add_dqn_flags(r)

    c = sub.add_parser("compare", help="A* against DQN over a directory of problems")
    c.add_argument("--problems", type=Path, required=True)
    c.add_argument("--out", type=Path, required=True, help="CSV path")
    c.add_argument("--workers", type=int, default=1)
    _add_dqn_flags(c)
    return parser


def write_manifest(path: Path, command: str, args: dict, seed: int, outputs, **extra) -> None:
    manifest = {
        "command": command,
        "args": {k: (str(v) if isinstance(v, Path) else v) for k, v in args.items()},
        "seed": seed,
        "versions": {"drlroute": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "outputs": [str(p) for p in outputs],
        **extra,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=False) + "\n")


def _load(path: Path):
    try:
        return parse_problem(path.read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except ParseError as e:
        raise UsageError(f"{path}: {e}") from None


def cmd_generate(args) -> int:
    w, h = args.grid
    spec = GenSpec(
        problem_count=args.count,
        width=w,
        height=h,
        net_count=args.nets,
        max_pins_per_net=args.max_pins,
        normal_capacity=args.cap,
        reduced_edge_count=args.reduce,
        reduced_value=args.reduced_value,
        seed=args.seed,
    )
    try:
        spec.validate()
    except ValueError as e:
        raise UsageError(str(e)) from None
    paths = write_problem_set(generate(spec), args.out, heatmaps=args.heatmaps)
    write_manifest(args.out / "manifest.json", "generate", vars(args), spec.seed, paths, config=asdict(spec))
    print(f"wrote {len(paths)} problem(s) to {args.out}")
    return EXIT_OK


def cmd_route(args) -> int:
    problem = _load(args.problem)
    out = args.out or args.problem.parent
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.problem.stem}.{args.solver}"
    outputs, config, status = [], None, EXIT_OK

    if args.solver == "astar":
        try:
            sol, _ = route_problem(problem)
        except Unreachable as e:
            sol, text = None, f"infeasible: {e}\n"
    else:
        cfg = train_config(args)
        config = cfg.as_dict()
        result = train(problem, cfg, progress_every=100 if args.verbose else 0)
        sol = result.best_solution
        text = "infeasible: no episode routed every two-pin task\n"
        rewards = out / f"{args.problem.stem}.rewards.csv"
        rewards.write_text(reward_curve_csv(result.rewards))
        weights = out / f"{args.problem.stem}.weights.bin"
        result.network.save(weights)
        outputs += [rewards, weights]

    if sol is not None:
        text = report(problem, sol)
        sol_path = out / f"{stem}.sol"
        sol_path.write_text(write_solution(sol))
        outputs.append(sol_path)
    else:
        status = EXIT_INFEASIBLE
    rep = out / f"{stem}.report"
    rep.write_text(text)
    outputs.append(rep)
    write_manifest(out / f"{stem}.manifest.json", "route", vars(args), args.seed, outputs, config=config)
    sys.stdout.write(text)
    return status


def _compare_one(path: Path, cfg: TrainConfig):
    """Worker: returns (name, problem, type, astar solution, dqn solution, error)."""
    try:
        problem = parse_problem(path.read_text())
        astar_sol, _ = route_problem(problem)
        kind = classify(problem, astar_sol)
        dqn_sol = train(problem, cfg).best_solution
        return path.stem, problem, kind, astar_sol, dqn_sol, None
    except (OSError, ParseError, Unreachable) as e:
        return path.stem, None, None, None, None, str(e)


def cmd_compare(args) -> int:
    if not args.problems.is_dir():
        raise UsageError(f"{args.problems} is not a directory")
    files = sorted(args.problems.glob("*.gr"))
    if not files:
        raise UsageError(f"no .gr problem files in {args.problems}")
    cfg = train_config(args)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.workers == 1:
        results = [_compare_one(f, cfg) for f in files]
    else:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_compare_one, files, [cfg] * len(files)))

    rows = []
    for name, problem, kind, a, b, err in results:
        if err is not None:
            rows.append([name, "", "", "", "", "", "", f"error: {err}"])
            continue
        if b is None or not all(check_connectivity(problem, b)):
            rows.append([name, kind.value, "", "", "", "", "", "dqn found no complete episode"])
            continue
        r = compare([(name, problem, a, b)]).rows[0]
        rows.append([name, kind.value, r.wl_a, r.of_a, r.wl_b, r.of_b, int(r.b_wins), "ok"])

    ok = [r for r in rows if r[-1] == "ok"]
    summary = [["summary", "all", "", "", "", "", f"{_rate(ok):.4f}", f"{len(ok)}/{len(rows)} compared"]]
    for kind in ProblemType:
        sub = [r for r in ok if r[1] == kind.value]
        if sub:
            summary.append(["summary", kind.value, "", "", "", "", f"{_rate(sub):.4f}", f"{len(sub)} compared"])

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["problem", "type", "astar_wl", "astar_of", "dqn_wl", "dqn_of", "dqn_wins", "status"])
        w.writerows(rows + summary)
    write_manifest(args.out.with_suffix(".manifest.json"), "compare", vars(args), cfg.seed, [args.out],
                   config=cfg.as_dict())
    for s in summary:
        print(f"{s[1]} win rate {s[6]} ({s[7]})")
    return EXIT_OK if len(ok) == len(rows) else EXIT_INFEASIBLE


def _rate(rows) -> float:
    return sum(r[6] for r in rows) / len(rows) if rows else 0.0


COMMANDS = {"generate": cmd_generate, "route": cmd_route, "compare": cmd_compare}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"drlroute: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
