"""Sequential two-pin routing environment.

The observation is a 12-vector ``(x, y, z, dx, dy, dz, c0..c5)``: the agent
cell, the signed offset to the goal, and the current capacity of the six
outgoing edges in action order (0 when the move leaves the grid). A move is
legal iff its capacity entry is positive, so legality can be read straight
off the observation.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .grid import N_ACTIONS, Gcell, GridGraph, move

STATE_DIM = 12
GOAL_REWARD = 100.0
STEP_REWARD = -1.0


class Transition(NamedTuple):
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    is_terminal: bool


def encode_state(grid: GridGraph, cell, goal) -> np.ndarray:
    x, y, z = cell
    return np.array(
        [x, y, z, goal[0] - x, goal[1] - y, goal[2] - z, *grid.local_capacities(cell)],
        dtype=np.float64,
    )


def legal_actions(state) -> list[int]:
    return [a for a in range(N_ACTIONS) if state[6 + a] > 0]


class IllegalAction(ValueError):
    pass


class RoutingEnv:
    """One agent routing one two-pin task at a time on a shared grid.

    Capacity consumption accumulates across tasks until the caller restores
    the grid. An episode over a problem is: restore, then ``reset``/``step``
    through every task in order.
    """

    def __init__(self, grid: GridGraph, t_max: int = 50):
        if t_max < 1:
            raise ValueError("t_max must be >= 1")
        self.grid = grid
        self.t_max = t_max
        self.agent: Gcell | None = None
        self.goal: Gcell | None = None
        self.steps = 0
        self.path: list[Gcell] = []
        self.solved = False
        self.done = True
        self._state: np.ndarray | None = None

    def reset(self, task) -> np.ndarray:
        self.agent = Gcell(*task.start)
        self.goal = Gcell(*task.goal)
        self.steps = 0
        self.path = [self.agent]
        self.solved = False
        self._state = s = encode_state(self.grid, self.agent, self.goal)
        self.done = not (s[6:] > 0).any()
        return s

    @property
    def state(self) -> np.ndarray:
        return self._state

    def legal_actions(self, state=None) -> list[int]:
        return legal_actions(self._state if state is None else state)

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        if self.done:
            raise RuntimeError("step() called on a finished task; call reset()")
        if not 0 <= action < N_ACTIONS or self._state[6 + action] <= 0:
            raise IllegalAction(f"action {action} is not legal at {tuple(self.agent)}")
        self.grid.cross_edge(self.agent, action)
        self.agent = move(self.agent, action)
        self.path.append(self.agent)
        self.steps += 1
        self._state = s = encode_state(self.grid, self.agent, self.goal)
        if self.agent == self.goal:
            self.solved = self.done = True
            return s, GOAL_REWARD, True
        if self.steps >= self.t_max or not (s[6:] > 0).any():
            self.done = True
        return s, STEP_REWARD, self.done
