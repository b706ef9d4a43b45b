import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from drlroute.decompose import decompose, decompose_all, distinct_pins, tree_weight
from drlroute.grid import Gcell
from drlroute.problem_io import Net, Problem

from oracles import brute_force_mst_weight


def net(*pins):
    return Net("n", 0, [Gcell(*p) for p in pins])


def test_two_pins():
    tasks = decompose(net((0, 0, 0), (3, 1, 1)))
    assert [(t.start, t.goal) for t in tasks] == [((0, 0, 0), (3, 1, 1))]


def test_single_or_coincident_pins():
    assert decompose(net((1, 1, 0))) == []
    assert decompose(net((1, 1, 0), (1, 1, 0), (1, 1, 0))) == []


def test_three_colinear_pins():
    tasks = decompose(net((0, 0, 0), (2, 0, 0), (5, 0, 0)))
    assert [(t.start, t.goal) for t in tasks] == [((0, 0, 0), (2, 0, 0)), ((2, 0, 0), (5, 0, 0))]
    assert tree_weight(tasks) == 5 == brute_force_mst_weight([(0, 0, 0), (2, 0, 0), (5, 0, 0)])


def _problem(pin_lists):
    return Problem(8, 8, 3, 3, [Net(f"n{i}", i, [Gcell(*p) for p in pins]) for i, pins in enumerate(pin_lists)])


def test_decompose_all_counts_and_order():
    rng = np.random.default_rng(0)
    pins = []
    for i in range(10):
        k = 3 if i in (2, 5, 7) else 2
        cells = rng.choice(128, size=k, replace=False)
        pins.append([(c // 16, (c // 2) % 8, c % 2) for c in cells])
    tasks = decompose_all(_problem(pins))
    assert len(tasks) == 13
    assert [t.order_index for t in tasks] == list(range(13))
    assert [t.net_index for t in tasks] == sorted(t.net_index for t in tasks)


def test_fifty_two_pin_nets(fig4_problem):
    tasks = decompose_all(fig4_problem)
    assert len(tasks) == 50
    assert [t.net_id for t in tasks] == list(range(50))


pin = st.tuples(st.integers(0, 7), st.integers(0, 7), st.integers(0, 1))


@given(st.lists(pin, min_size=1, max_size=7))
def test_mst_is_minimal_and_spanning(pins):
    tasks = decompose(net(*pins))
    distinct = distinct_pins(pins)
    assert len(tasks) == len(distinct) - 1
    assert tree_weight(tasks) == brute_force_mst_weight(pins)
    # connected: union-find over task endpoints reaches every pin
    parent = {p: p for p in distinct}

    def find(p):
        while parent[p] != p:
            p = parent[p]
        return p

    for t in tasks:
        assert t.start != t.goal
        parent[find(t.start)] = find(t.goal)
    assert len({find(p) for p in distinct}) == 1


@given(st.lists(pin, min_size=1, max_size=7))
def test_deterministic(pins):
    assert decompose(net(*pins)) == decompose(net(*pins))
