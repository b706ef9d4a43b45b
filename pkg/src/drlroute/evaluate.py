"""Scoring of routing solutions: wirelength, overflow, connectivity, problem type."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .decompose import distinct_pins
from .grid import GridGraph, edge_id
from .problem_io import Problem, RouteSolution


class ProblemType(enum.Enum):
    TYPE_I = "TypeI"    # no positive-capacity edge depleted by the A* solution
    TYPE_II = "TypeII"  # at least one positive-capacity edge fully used


def edge_usage(grid: GridGraph, solution: RouteSolution) -> np.ndarray:
    """Crossings per edge number, summed over nets."""
    usage = np.zeros(grid.num_edges, dtype=np.int64)
    for a, b in solution.segments():
        try:
            usage[grid.edge_index[edge_id(a, b)]] += 1
        except KeyError:
            raise ValueError(f"segment {a}-{b} is not an edge of the grid") from None
    return usage


def wirelength(solution: RouteSolution) -> int:
    return sum(len(net.segments) for net in solution.nets)


def overflow(problem: Problem, solution: RouteSolution) -> int:
    grid = problem.build_grid()
    return int(np.maximum(edge_usage(grid, solution) - grid.cap, 0).sum())


def per_net_overflow(problem: Problem, solution: RouteSolution) -> list[int]:
    """Overflow charged to the net whose crossing exceeded capacity, in net order.

    Sums to :func:`overflow`.
    """
    grid = problem.build_grid()
    remaining = grid.cap.copy()
    out = []
    for net in solution.nets:
        of = 0
        for a, b in net.segments:
            e = grid.edge_index[edge_id(a, b)]
            if remaining[e] <= 0:
                of += 1
            remaining[e] -= 1
        out.append(of)
    return out


def check_connectivity(problem: Problem, solution: RouteSolution) -> list[bool]:
    """Per net: do its segments form one connected graph covering all its pins?"""
    routes = {net.name: net for net in solution.nets}
    flags = []
    for net in problem.nets:
        pins = distinct_pins(net.pins)
        route = routes.get(net.name)
        segs = route.segments if route is not None else []
        parent: dict = {}

        def find(c):
            while parent[c] != c:
                parent[c] = parent[parent[c]]
                c = parent[c]
            return c

        for a, b in segs:
            parent.setdefault(a, a)
            parent.setdefault(b, b)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        if not segs:
            flags.append(len(pins) <= 1)
            continue
        if any(p not in parent for p in pins):
            flags.append(False)
            continue
        flags.append(len({find(c) for c in parent}) == 1)
    return flags


def classify(problem: Problem, astar_solution: RouteSolution) -> ProblemType:
    grid = problem.build_grid()
    usage = edge_usage(grid, astar_solution)
    depleted = (grid.cap > 0) & (usage >= grid.cap)
    return ProblemType.TYPE_II if depleted.any() else ProblemType.TYPE_I


def better(of_a: int, wl_a: int, of_b: int, wl_b: int) -> bool:
    """True if (of_b, wl_b) is strictly better than (of_a, wl_a)."""
    return (of_b, wl_b) < (of_a, wl_a)


@dataclass
class ComparisonRow:
    name: str
    wl_a: int
    of_a: int
    wl_b: int
    of_b: int
    b_wins: bool


@dataclass
class Comparison:
    rows: list[ComparisonRow]
    excluded: list[tuple[str, str]]  # (name, reason)

    @property
    def win_rate(self) -> float:
        return sum(r.b_wins for r in self.rows) / len(self.rows) if self.rows else 0.0


def compare(batch) -> Comparison:
    """``batch`` is an iterable of ``(name, problem, sol_a, sol_b)``; B wins on (OF, WL)."""
    rows, excluded = [], []
    for name, problem, sol_a, sol_b in batch:
        bad = [tag for tag, s in (("A", sol_a), ("B", sol_b)) if s is None or not all(check_connectivity(problem, s))]
        if bad:
            excluded.append((name, f"invalid solution {'/'.join(bad)}"))
            continue
        wl_a, of_a = wirelength(sol_a), overflow(problem, sol_a)
        wl_b, of_b = wirelength(sol_b), overflow(problem, sol_b)
        rows.append(ComparisonRow(name, wl_a, of_a, wl_b, of_b, better(of_a, wl_a, of_b, wl_b)))
    return Comparison(rows, excluded)


def report(problem: Problem, solution: RouteSolution) -> str:
    """Line-oriented evaluation report: ``net <name> WL <n> OF <n>`` plus totals."""
    ofs = per_net_overflow(problem, solution)
    lines = [f"net {net.name} WL {len(net.segments)} OF {of}" for net, of in zip(solution.nets, ofs)]
    lines.append(f"total WL {wirelength(solution)} OF {sum(ofs)}")
    return "\n".join(lines) + "\n"
