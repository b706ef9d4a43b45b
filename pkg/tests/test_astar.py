import numpy as np
import pytest

from drlroute.astar import OVERFLOW_COST, route_problem, route_two_pin
from drlroute.decompose import decompose_all
from drlroute.env import GOAL_REWARD, STEP_REWARD
from drlroute.evaluate import ProblemType, classify, edge_usage, overflow, wirelength
from drlroute.generator import GenSpec, generate
from drlroute.grid import Gcell, GridGraph, manhattan

from oracles import dijkstra_cost


def path_cost(grid, cells):
    return sum(1 if grid.capacity_of(a, b) > 0 else OVERFLOW_COST for a, b in zip(cells, cells[1:]))


def random_grid(rng, w=8, h=8):
    g = GridGraph(w, h, horizontal_capacity=3, vertical_capacity=3)
    g.cap[:] = rng.integers(-2, 4, size=g.num_edges)
    return g


def test_straight_line():
    g = GridGraph(8, 8, horizontal_capacity=5, vertical_capacity=5)
    path = route_two_pin(g, (0, 0, 0), (3, 0, 0))
    assert path.cost == 3
    assert path.cells == [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)]


def test_start_equals_goal():
    g = GridGraph(4, 4)
    path = route_two_pin(g, (1, 1, 1), (1, 1, 1))
    assert path.cells == [(1, 1, 1)] and path.cost == 0


def test_depleted_edge_costs_1000():
    g = GridGraph(2, 1, horizontal_capacity=0, vertical_capacity=0)
    # only route from (0,0,0) to (1,0,0) crosses a zero-capacity x-edge on some layer
    path = route_two_pin(g, (0, 0, 0), (1, 0, 0))
    assert path.cost == OVERFLOW_COST


def test_detours_around_depleted_edge():
    g = GridGraph(4, 1, horizontal_capacity=1, vertical_capacity=1)
    g.set_capacity((1, 0, 0), (2, 0, 0), 0)
    g.set_capacity((1, 0, 1), (2, 0, 1), 1)
    path = route_two_pin(g, (0, 0, 0), (3, 0, 0))
    # up, across on layer 1, down
    assert path.cost == 5
    assert (Gcell(1, 0, 1), Gcell(2, 0, 1)) in path.segments


def test_matches_dijkstra_random():
    rng = np.random.default_rng(42)
    for _ in range(40):
        g = random_grid(rng)
        s = tuple(int(v) for v in (rng.integers(8), rng.integers(8), rng.integers(2)))
        t = tuple(int(v) for v in (rng.integers(8), rng.integers(8), rng.integers(2)))
        path = route_two_pin(g, s, t)
        assert path.cost == dijkstra_cost(g, s, t)
        assert path_cost(g, path.cells) == path.cost
        assert path.cells[0] == s and path.cells[-1] == t


def test_heuristic_admissible_on_expanded_cells():
    rng = np.random.default_rng(5)
    g = random_grid(rng, 5, 5)
    goal = (4, 4, 1)
    for x in range(5):
        for y in range(5):
            for z in range(2):
                assert manhattan((x, y, z), goal) <= dijkstra_cost(g, (x, y, z), goal)


def test_route_problem_ample_capacity():
    p = generate(GenSpec(net_count=10, max_pins_per_net=2, normal_capacity=20, seed=4))[0]
    p.horizontal_capacity = p.vertical_capacity = 20
    # with no blocked direction every task is a pure Manhattan path
    grid = p.build_grid(off_direction_capacity=20)
    sol, _ = route_problem(p, grid)
    for task, net in zip(decompose_all(p), sol.nets):
        assert len(net.segments) == manhattan(task.start, task.goal)


def test_route_problem_bookkeeping(small_problem):
    grid = small_problem.build_grid()
    original = grid.cap.copy()
    sol, trans = route_problem(small_problem, grid)
    usage = edge_usage(grid, sol)
    assert (original - grid.cap == usage).all()
    assert wirelength(sol) >= sum(manhattan(t.start, t.goal) for t in decompose_all(small_problem))
    assert overflow(small_problem, sol) >= 0


def test_emitted_transitions(small_problem):
    sol, trans = route_problem(small_problem)
    assert trans
    for t in trans:
        assert t.reward in (GOAL_REWARD, STEP_REWARD)
        assert t.is_terminal == (t.reward == GOAL_REWARD)
        assert t.is_terminal == (not t.next_state[3:6].any())
        assert t.state[6 + t.action] > 0  # only moves the environment would allow
        assert len(t.state) == len(t.next_state) == 12


def test_transitions_drop_depleted_crossings():
    from drlroute.problem_io import Net, Problem

    p = Problem(3, 1, 0, 0, [Net("n", 0, [Gcell(0, 0, 0), Gcell(2, 0, 0)])])
    sol, trans = route_problem(p)
    # every in-layer x move on layer 0 has capacity 0
    assert wirelength(sol) == 2 and trans == []


def test_type_i_paths_are_lower_bound_paths():
    # x on layer 0, y on layer 1, ample capacity: optimal length adds a via pair when turning
    p = generate(GenSpec(net_count=8, max_pins_per_net=2, normal_capacity=50, seed=9))[0]
    sol, _ = route_problem(p)
    assert classify(p, sol) is ProblemType.TYPE_I
    grid = p.build_grid()
    for task, net in zip(decompose_all(p), sol.nets):
        assert len(net.segments) == dijkstra_cost(grid, task.start, task.goal)


def test_deterministic(fig4_problem):
    a = route_problem(fig4_problem)[0]
    b = route_problem(fig4_problem)[0]
    assert a == b


def test_out_of_bounds():
    with pytest.raises(IndexError):
        route_two_pin(GridGraph(4, 4), (0, 0, 0), (4, 0, 0))
