"""Random problem-set generator with normal and congestion-driven reduced capacity."""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .astar import route_problem
from .evaluate import edge_usage
from .grid import Gcell
from .problem_io import Net, Problem, RouteSolution, write_problem


@dataclass
class GenSpec:
    problem_count: int = 1
    width: int = 8
    height: int = 8
    net_count: int = 50
    max_pins_per_net: int = 2
    normal_capacity: int = 3
    reduced_edge_count: int = 0
    reduced_value: int = 1
    seed: int = 0

    def validate(self) -> None:
        if self.problem_count < 1:
            raise ValueError("problem_count must be >= 1")
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be positive")
        if self.net_count < 1:
            raise ValueError("net_count must be >= 1")
        if self.max_pins_per_net < 1:
            raise ValueError("max_pins_per_net must be >= 1")
        if self.max_pins_per_net > self.width * self.height * 2:
            raise ValueError(
                f"max_pins_per_net={self.max_pins_per_net} exceeds the "
                f"{self.width * self.height * 2} placeable Gcells"
            )
        if self.normal_capacity < 0 or self.reduced_edge_count < 0 or self.reduced_value < 0:
            raise ValueError("capacities and reduced_edge_count must be non-negative")


def _random_problem(spec: GenSpec, rng: np.random.Generator) -> Problem:
    w, h = spec.width, spec.height
    nets = []
    for i in range(spec.net_count):
        k = int(rng.integers(2, spec.max_pins_per_net + 1)) if spec.max_pins_per_net >= 2 else 1
        cells = rng.choice(w * h * 2, size=k, replace=False)
        # flat index = (x * h + y) * 2 + z
        pins = [Gcell(int(c) // (2 * h), (int(c) // 2) % h, int(c) % 2) for c in cells]
        nets.append(Net(f"net{i}", i, pins))
    return Problem(w, h, spec.normal_capacity, spec.normal_capacity, nets)


def select_congested_edges(problem: Problem, count: int) -> list:
    """The ``count`` most-used positive-capacity in-layer edges of the A* solution.

    Vias are never reduced: their capacity is effectively unlimited.
    """
    grid = problem.build_grid()
    solution, _ = route_problem(problem, grid.snapshot())
    usage = edge_usage(grid, solution)
    candidates = [i for i, (a, b) in enumerate(grid.edges) if grid.cap[i] > 0 and a.z == b.z]
    candidates.sort(key=lambda i: (-usage[i], grid.edges[i]))
    return sorted(grid.edges[i] for i in candidates[:count])


def generate(spec: GenSpec) -> list[Problem]:
    spec.validate()
    problems = []
    for seq in np.random.SeedSequence(spec.seed).spawn(spec.problem_count):
        p = _random_problem(spec, np.random.default_rng(seq))
        if spec.reduced_edge_count:
            p.reduced_edges = [(e, spec.reduced_value) for e in select_congested_edges(p, spec.reduced_edge_count)]
        problems.append(p)
    return problems


@dataclass
class EdgeUtilization:
    usage: np.ndarray           # crossings per grid edge number
    histogram: dict[int, int]   # usage value -> number of edges
    horizontal: np.ndarray      # x-edge usage summed over layers, [x, y]
    vertical: np.ndarray        # y-edge usage summed over layers, [x, y]
    via: np.ndarray             # via usage, [x, y]

    @property
    def histogram_mass(self) -> int:
        return sum(u * n for u, n in self.histogram.items())


def edge_utilization(problem: Problem, solution: RouteSolution) -> EdgeUtilization:
    grid = problem.build_grid()
    usage = edge_usage(grid, solution)
    hist = dict(sorted(Counter(int(u) for u in usage).items()))
    return EdgeUtilization(
        usage,
        hist,
        usage[grid.x_index].sum(axis=2),
        usage[grid.y_index].sum(axis=2),
        usage[grid.z_index].sum(axis=2),
    )


def heatmap_csv(util: EdgeUtilization) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["direction", "x", "y", "usage"])
    for name, mat in (("horizontal", util.horizontal), ("vertical", util.vertical), ("via", util.via)):
        for (x, y), u in np.ndenumerate(mat):
            w.writerow([name, x, y, int(u)])
    return buf.getvalue()


def histogram_csv(util: EdgeUtilization) -> str:
    return "usage,count\n" + "".join(f"{u},{n}\n" for u, n in util.histogram.items())


def write_problem_set(problems: list[Problem], out_dir, *, heatmaps: bool = False) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, p in enumerate(problems):
        path = out_dir / f"problem_{i:03d}.gr"
        path.write_text(write_problem(p))
        if heatmaps:
            util = edge_utilization(p, route_problem(p)[0])
            path.with_suffix(".heat.csv").write_text(heatmap_csv(util))
            path.with_suffix(".hist.csv").write_text(histogram_csv(util))
        paths.append(path)
    return paths
