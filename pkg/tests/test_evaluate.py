import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drlroute.astar import route_problem
from drlroute.evaluate import (
    ProblemType,
    check_connectivity,
    classify,
    compare,
    edge_usage,
    overflow,
    per_net_overflow,
    report,
    wirelength,
)
from drlroute.generator import GenSpec, edge_utilization, generate
from drlroute.grid import Gcell
from drlroute.problem_io import Net, NetRoute, Problem, RouteSolution

from oracles import tally_overflow, tally_wirelength

G = Gcell


def line(x0, x1, y=0, z=0):
    return [(G(x, y, z), G(x + 1, y, z)) for x in range(x0, x1)]


def one_net_problem(cap=3):
    return Problem(8, 8, cap, cap, [Net("a", 0, [G(0, 0, 0), G(5, 0, 0)])])


def test_wirelength():
    assert wirelength(RouteSolution()) == 0
    assert wirelength(RouteSolution([NetRoute("a", 0, line(0, 5))])) == 5


def test_overflow_simple():
    p = one_net_problem()
    assert overflow(p, RouteSolution([NetRoute("a", 0, line(0, 5))])) == 0
    seg = (G(0, 0, 0), G(1, 0, 0))
    assert overflow(p, RouteSolution([NetRoute("a", 0, [seg] * 5)])) == 2


def test_overflow_on_blocked_direction():
    p = one_net_problem()
    # y-edges on layer 0 have capacity 0
    assert overflow(p, RouteSolution([NetRoute("a", 0, [(G(0, 0, 0), G(0, 1, 0))])])) == 1


def test_per_net_overflow_sums_to_total(fig4_problem):
    sol, _ = route_problem(fig4_problem)
    ofs = per_net_overflow(fig4_problem, sol)
    assert sum(ofs) == overflow(fig4_problem, sol)
    text = report(fig4_problem, sol)
    assert text.splitlines()[0].startswith("net net0 WL ")
    assert text.splitlines()[-1] == f"total WL {wirelength(sol)} OF {overflow(fig4_problem, sol)}"


def test_connectivity():
    p = one_net_problem()
    assert check_connectivity(p, RouteSolution([NetRoute("a", 0, line(0, 5))])) == [True]
    broken = line(0, 2) + line(3, 5)
    assert check_connectivity(p, RouteSolution([NetRoute("a", 0, broken)])) == [False]
    assert check_connectivity(p, RouteSolution([NetRoute("a", 0, [])])) == [False]


def test_connectivity_junction():
    # three pins joined by two sub-paths meeting at (2,0,0)
    p = Problem(8, 8, 3, 3, [Net("a", 0, [G(0, 0, 0), G(4, 0, 0), G(2, 0, 1)])])
    segs = line(0, 4) + [(G(2, 0, 0), G(2, 0, 1))]
    assert check_connectivity(p, RouteSolution([NetRoute("a", 0, segs)])) == [True]


def test_astar_solutions_are_connected(small_problem, fig4_problem):
    for p in (small_problem, fig4_problem):
        sol, _ = route_problem(p)
        assert all(check_connectivity(p, sol))


def test_classify():
    p = one_net_problem(cap=3)
    assert classify(p, RouteSolution([NetRoute("a", 0, line(0, 5))])) is ProblemType.TYPE_I
    seg = (G(0, 0, 0), G(1, 0, 0))
    assert classify(p, RouteSolution([NetRoute("a", 0, [seg] * 3)])) is ProblemType.TYPE_II


def test_classify_ignores_net_order(fig4_problem):
    sol, _ = route_problem(fig4_problem)
    shuffled = RouteSolution(list(reversed(sol.nets)))
    assert classify(fig4_problem, sol) is classify(fig4_problem, shuffled)


def test_compare():
    p = one_net_problem()
    a = RouteSolution([NetRoute("a", 0, line(0, 5))])
    longer = RouteSolution([NetRoute("a", 0, line(0, 5) + [(G(5, 0, 0), G(5, 0, 1)), (G(5, 0, 1), G(5, 0, 0))])])
    assert compare([("p", p, a, a)]).win_rate == 0.0
    assert compare([("p", p, longer, a)]).win_rate == 1.0
    broken = RouteSolution([NetRoute("a", 0, line(0, 2))])
    c = compare([("p", p, a, broken), ("q", p, longer, a)])
    assert len(c.rows) == 1 and c.excluded[0][0] == "p"


def test_oracle_equivalence_random_solutions(small_problem):
    rng = np.random.default_rng(0)
    p = small_problem
    grid = p.build_grid()
    for _ in range(20):
        picks = rng.integers(0, grid.num_edges, size=int(rng.integers(0, 60)))
        segs = [grid.edges[i] for i in picks]
        sol = RouteSolution([NetRoute("x", 0, segs)])
        assert wirelength(sol) == tally_wirelength(sol)
        assert overflow(p, sol) == tally_overflow(p, sol)
        assert edge_usage(grid, sol).sum() == wirelength(sol)


def test_bad_segment_rejected():
    p = one_net_problem()
    with pytest.raises(ValueError):
        edge_usage(p.build_grid(), RouteSolution([NetRoute("a", 0, [(G(7, 0, 0), G(8, 0, 0))])]))


@given(st.lists(st.integers(0, 200), max_size=30), st.integers(0, 200))
def test_overflow_monotone(picks, extra):
    p = Problem(5, 5, 1, 1, [Net("a", 0, [G(0, 0, 0)])])
    grid = p.build_grid()
    segs = [grid.edges[i % grid.num_edges] for i in picks]
    before = overflow(p, RouteSolution([NetRoute("a", 0, segs)]))
    after = overflow(p, RouteSolution([NetRoute("a", 0, segs + [grid.edges[extra % grid.num_edges]])]))
    assert after >= before


def test_histogram_mass_equals_wl(fig4_problem):
    sol, _ = route_problem(fig4_problem)
    util = edge_utilization(fig4_problem, sol)
    assert util.histogram_mass == wirelength(sol) == tally_wirelength(sol)
    assert util.horizontal.sum() + util.vertical.sum() + util.via.sum() == wirelength(sol)


def test_type_frequency_grows_with_nets():
    def type2_rate(nets):
        ps = generate(GenSpec(problem_count=10, net_count=nets, normal_capacity=5, seed=100 + nets))
        return sum(classify(p, route_problem(p)[0]) is ProblemType.TYPE_II for p in ps)

    assert type2_rate(50) > type2_rate(30)
