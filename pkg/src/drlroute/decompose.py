"""Minimum-spanning-tree decomposition of multi-pin nets into two-pin tasks."""
from __future__ import annotations

from dataclasses import dataclass

from .grid import Gcell, manhattan
from .problem_io import Net, Problem


@dataclass(frozen=True)
class TwoPinTask:
    net_index: int  # position of the net in the problem file
    net_id: int
    start: Gcell
    goal: Gcell
    order_index: int = 0


def distinct_pins(pins) -> list[Gcell]:
    seen, out = set(), []
    for p in pins:
        p = Gcell(*p)
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def mst_edges(points: list[Gcell]) -> list[tuple[int, int]]:
    """Prim's algorithm under 3-D Manhattan distance.

    Returns ``(tree_index, new_index)`` pairs in the order vertices join the
    tree, so every edge starts at an already-connected point. Equal weights
    are broken by lower point indices.
    """
    n = len(points)
    if n < 2:
        return []
    in_tree = [False] * n
    in_tree[0] = True
    best = [(manhattan(points[0], points[j]), 0) for j in range(n)]
    edges = []
    for _ in range(n - 1):
        j = min((j for j in range(n) if not in_tree[j]), key=lambda j: (best[j][0], best[j][1], j))
        edges.append((best[j][1], j))
        in_tree[j] = True
        for k in range(n):
            if not in_tree[k]:
                d = manhattan(points[j], points[k])
                if (d, j) < best[k]:
                    best[k] = (d, j)
    return edges


def decompose(net: Net, net_index: int = 0) -> list[TwoPinTask]:
    pts = distinct_pins(net.pins)
    return [TwoPinTask(net_index, net.id, pts[i], pts[j]) for i, j in mst_edges(pts)]


def decompose_all(problem: Problem) -> list[TwoPinTask]:
    tasks = []
    for k, net in enumerate(problem.nets):
        for t in decompose(net, k):
            tasks.append(TwoPinTask(t.net_index, t.net_id, t.start, t.goal, len(tasks)))
    return tasks


def tree_weight(tasks) -> int:
    return sum(manhattan(t.start, t.goal) for t in tasks)
