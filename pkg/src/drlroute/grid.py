"""Two-layer grid graph with per-edge integer capacities.

Gcells are addressed as ``(x, y, z)`` with 0-based layer ``z``. Edges are
undirected: a crossing in either direction consumes the same capacity.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

#: Default capacity of every via edge; large enough that vias never overflow.
VIA_CAPACITY = 100

N_ACTIONS = 6

# action code -> (dx, dy, dz); codes 0..5 are moves G1..G6
ACTION_DELTAS = (
    (1, 0, 0),   # G1 east
    (0, 0, 1),   # G2 up
    (-1, 0, 0),  # G3 west
    (0, 0, -1),  # G4 down
    (0, 1, 0),   # G5 north
    (0, -1, 0),  # G6 south
)
ACTION_NAMES = ("+x", "+z", "-x", "-z", "+y", "-y")
REVERSE_ACTION = (2, 3, 0, 1, 5, 4)


class Gcell(NamedTuple):
    x: int
    y: int
    z: int


EdgeId = tuple[Gcell, Gcell]


def edge_id(a, b) -> EdgeId:
    """Canonical (sorted) form of the undirected edge between adjacent cells."""
    a, b = Gcell(*a), Gcell(*b)
    if sum(abs(p - q) for p, q in zip(a, b)) != 1:
        raise ValueError(f"{a} and {b} are not lattice-adjacent")
    return (a, b) if a < b else (b, a)


def move(c, action: int) -> Gcell:
    dx, dy, dz = ACTION_DELTAS[action]
    return Gcell(c[0] + dx, c[1] + dy, c[2] + dz)


def action_between(a, b) -> int:
    """Action code that moves from ``a`` to the adjacent cell ``b``."""
    d = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
    try:
        return ACTION_DELTAS.index(d)
    except ValueError:
        raise ValueError(f"{a} and {b} are not lattice-adjacent") from None


def manhattan(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) + abs(a[2] - b[2])


class GridGraph:
    """Lattice of ``width x height x 2`` Gcells with mutable edge capacities.

    Capacities live in one flat integer array ``cap`` indexed by edge number;
    ``edges[i]`` is the canonical :data:`EdgeId` of edge ``i``. The normal
    capacity directions are x-edges on layer 0 (``horizontal_capacity``) and
    y-edges on layer 1 (``vertical_capacity``); the orthogonal in-layer
    directions get ``off_direction_capacity`` and vias get ``via_capacity``.
    """

    def __init__(
        self,
        width: int,
        height: int,
        layers: int = 2,
        *,
        horizontal_capacity: int = 0,
        vertical_capacity: int = 0,
        off_direction_capacity: int = 0,
        via_capacity: int = VIA_CAPACITY,
    ):
        if layers != 2:
            raise ValueError("only two-layer grids are supported")
        if width < 1 or height < 1:
            raise ValueError("grid dimensions must be positive")
        self.width = width
        self.height = height
        self.layers = layers

        edges: list[EdgeId] = []
        caps: list[int] = []
        x_index = np.full((max(width - 1, 0), height, layers), -1, dtype=np.int64)
        y_index = np.full((width, max(height - 1, 0), layers), -1, dtype=np.int64)
        z_index = np.full((width, height, layers - 1), -1, dtype=np.int64)
        for x in range(width):
            for y in range(height):
                for z in range(layers):
                    a = Gcell(x, y, z)
                    if x + 1 < width:
                        x_index[x, y, z] = len(edges)
                        edges.append((a, Gcell(x + 1, y, z)))
                        caps.append(horizontal_capacity if z == 0 else off_direction_capacity)
                    if y + 1 < height:
                        y_index[x, y, z] = len(edges)
                        edges.append((a, Gcell(x, y + 1, z)))
                        caps.append(vertical_capacity if z == 1 else off_direction_capacity)
                    if z + 1 < layers:
                        z_index[x, y, z] = len(edges)
                        edges.append((a, Gcell(x, y, z + 1)))
                        caps.append(via_capacity)
        self.edges = edges
        self.edge_index = {e: i for i, e in enumerate(edges)}
        self.cap = np.array(caps, dtype=np.int64)
        self.x_index, self.y_index, self.z_index = x_index, y_index, z_index

        # slots[x][y][z] -> tuple of 6 edge numbers in action order, -1 when off-grid
        slots = [[[None] * layers for _ in range(height)] for _ in range(width)]
        for x in range(width):
            for y in range(height):
                for z in range(layers):
                    row = []
                    for a in range(N_ACTIONS):
                        n = move((x, y, z), a)
                        if self.in_bounds(n):
                            row.append(self.edge_index[edge_id((x, y, z), n)])
                        else:
                            row.append(-1)
                    slots[x][y][z] = tuple(row)
        self.slots = slots

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.width, self.height, self.layers)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def h_cap(self) -> np.ndarray:
        """Capacities of x-edges on layer 0, indexed ``[x, y]``."""
        return self.cap[self.x_index[:, :, 0]]

    @property
    def v_cap(self) -> np.ndarray:
        """Capacities of y-edges on layer 1, indexed ``[x, y]``."""
        return self.cap[self.y_index[:, :, 1]]

    def in_bounds(self, c) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height and 0 <= c[2] < self.layers

    def neighbors(self, c) -> list[tuple[int, Gcell]]:
        """In-bounds moves from ``c`` as ``(action, cell)``, ascending action code."""
        return [(a, move(c, a)) for a, e in enumerate(self.slots[c[0]][c[1]][c[2]]) if e >= 0]

    def edge_number(self, c, action: int) -> int:
        if not self.in_bounds(c):
            raise IndexError(f"cell {tuple(c)} is outside the grid")
        e = self.slots[c[0]][c[1]][c[2]][action]
        if e < 0:
            raise IndexError(f"move {ACTION_NAMES[action]} from {tuple(c)} leaves the grid")
        return e

    def edge_capacity(self, c, action: int) -> int:
        return int(self.cap[self.edge_number(c, action)])

    def cross_edge(self, c, action: int) -> None:
        self.cap[self.edge_number(c, action)] -= 1

    def capacity_of(self, a, b) -> int:
        return int(self.cap[self.edge_index[edge_id(a, b)]])

    def set_capacity(self, a, b, value: int) -> None:
        self.cap[self.edge_index[edge_id(a, b)]] = value

    def local_capacities(self, c) -> list[int]:
        """Current capacities of the six outgoing edges; 0 for off-grid moves."""
        cap = self.cap
        return [int(cap[e]) if e >= 0 else 0 for e in self.slots[c[0]][c[1]][c[2]]]

    def snapshot(self) -> GridGraph:
        snap = object.__new__(GridGraph)
        snap.__dict__.update(self.__dict__)
        snap.cap = self.cap.copy()
        return snap

    def restore(self, snap: GridGraph) -> None:
        if snap.shape != self.shape:
            raise ValueError(f"snapshot shape {snap.shape} does not match grid {self.shape}")
        self.cap[:] = snap.cap
