"""Sequential A* router.

Each move costs 1 across an edge with positive remaining capacity and
``OVERFLOW_COST`` across a depleted one; the heuristic is 3-D Manhattan
distance. Two-pin tasks are routed in decomposition order and each found
path consumes capacity before the next task is searched.
"""
from __future__ import annotations

import heapq
from typing import NamedTuple

from .decompose import TwoPinTask, decompose_all
from .env import GOAL_REWARD, STEP_REWARD, Transition, encode_state
from .grid import Gcell, GridGraph, action_between, manhattan, move
from .problem_io import NetRoute, Problem, RouteSolution

OVERFLOW_COST = 1000


class Path(NamedTuple):
    cells: list[Gcell]
    cost: int

    @property
    def segments(self) -> list[tuple[Gcell, Gcell]]:
        return list(zip(self.cells, self.cells[1:]))


class Unreachable(RuntimeError):
    pass


def step_cost(capacity: int) -> int:
    return 1 if capacity > 0 else OVERFLOW_COST


def route_two_pin(grid: GridGraph, start, goal) -> Path:
    """Minimum-cost path from ``start`` to ``goal`` given current capacities.

    Ties in the open list go to lower f, then lower h, then the smaller cell.
    """
    start, goal = Gcell(*start), Gcell(*goal)
    if not (grid.in_bounds(start) and grid.in_bounds(goal)):
        raise IndexError("start or goal outside the grid")
    if start == goal:
        return Path([start], 0)
    cap, slots = grid.cap, grid.slots
    gx, gy, gz = goal
    h0 = manhattan(start, goal)
    open_heap = [(h0, h0, start)]
    g_score = {start: 0}
    parent: dict[Gcell, Gcell] = {}
    closed = set()
    while open_heap:
        _, _, c = heapq.heappop(open_heap)
        if c in closed:
            continue
        if c == goal:
            break
        closed.add(c)
        gc = g_score[c]
        for a, e in enumerate(slots[c[0]][c[1]][c[2]]):
            if e < 0:
                continue
            n = move(c, a)
            if n in closed:
                continue
            ng = gc + (1 if cap[e] > 0 else OVERFLOW_COST)
            if ng < g_score.get(n, ng + 1):
                g_score[n] = ng
                parent[n] = c
                h = abs(n[0] - gx) + abs(n[1] - gy) + abs(n[2] - gz)
                heapq.heappush(open_heap, (ng + h, h, n))
    else:
        raise Unreachable(f"no path from {start} to {goal}")
    cells = [goal]
    while cells[-1] != start:
        cells.append(parent[cells[-1]])
    cells.reverse()
    return Path(cells, g_score[goal])


def commit_path(grid: GridGraph, cells, goal=None, transitions: list | None = None) -> None:
    """Consume capacity along ``cells``; optionally record env-style transitions.

    Moves across an already-depleted edge are omitted from ``transitions``
    because the environment would never allow them.
    """
    goal = cells[-1] if goal is None else goal
    for c, n in zip(cells, cells[1:]):
        a = action_between(c, n)
        if transitions is None:
            grid.cross_edge(c, a)
            continue
        legal = grid.edge_capacity(c, a) > 0
        s = encode_state(grid, c, goal)
        grid.cross_edge(c, a)
        if legal:
            at_goal = n == goal
            s2 = encode_state(grid, n, goal)
            transitions.append(Transition(s, a, GOAL_REWARD if at_goal else STEP_REWARD, s2, at_goal))


def merge_paths(problem: Problem, tasks: list[TwoPinTask], paths) -> RouteSolution:
    routes = [NetRoute(net.name, net.id) for net in problem.nets]
    for task, cells in zip(tasks, paths):
        routes[task.net_index].segments.extend(zip(cells, cells[1:]))
    return RouteSolution(routes)


def route_problem(problem: Problem, grid: GridGraph | None = None) -> tuple[RouteSolution, list[Transition]]:
    """Route every two-pin task in order, mutating ``grid`` (a fresh one if omitted)."""
    grid = problem.build_grid() if grid is None else grid
    tasks = decompose_all(problem)
    transitions: list[Transition] = []
    paths = []
    for task in tasks:
        path = route_two_pin(grid, task.start, task.goal)
        commit_path(grid, path.cells, task.goal, transitions)
        paths.append(path.cells)
    return merge_paths(problem, tasks, paths), transitions
