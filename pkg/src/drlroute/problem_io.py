"""Problem and solution text formats.

Problem file (layers are 1-based on disk, 0-based in memory)::

    grid W H 2
    vertical capacity Cv
    horizontal capacity Ch
    num net N
    <name> <id> <pin_count>
    x y z                      # pin_count lines
    ...
    num reduced edges K
    x1 y1 z1 x2 y2 z2 cap      # K lines

Solution file: per net a ``<name> <id>`` header, one ``(x1,y1,z1)-(x2,y2,z2)``
line per unit segment, then ``!``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .grid import VIA_CAPACITY, EdgeId, Gcell, GridGraph, edge_id, manhattan


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class Net:
    name: str
    id: int
    pins: list[Gcell]


@dataclass
class Problem:
    width: int
    height: int
    vertical_capacity: int
    horizontal_capacity: int
    nets: list[Net] = field(default_factory=list)
    reduced_edges: list[tuple[EdgeId, int]] = field(default_factory=list)
    layers: int = 2

    def build_grid(self, via_capacity: int = VIA_CAPACITY, off_direction_capacity: int = 0) -> GridGraph:
        g = GridGraph(
            self.width,
            self.height,
            self.layers,
            horizontal_capacity=self.horizontal_capacity,
            vertical_capacity=self.vertical_capacity,
            off_direction_capacity=off_direction_capacity,
            via_capacity=via_capacity,
        )
        for (a, b), value in self.reduced_edges:
            g.set_capacity(a, b, value)
        return g

    def in_bounds(self, c) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height and 0 <= c[2] < self.layers


@dataclass
class NetRoute:
    name: str
    id: int
    segments: list[tuple[Gcell, Gcell]] = field(default_factory=list)


@dataclass
class RouteSolution:
    nets: list[NetRoute] = field(default_factory=list)

    def segments(self):
        for net in self.nets:
            yield from net.segments


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(lineno, f"expected integers, got {' '.join(tokens)!r}") from None


def parse_problem(text: str) -> Problem:
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(n, toks) for n, toks in lines if toks]
    pos = 0

    def take(keyword: tuple[str, ...], nvals: int):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(len(text.splitlines()) + 1, f"expected '{' '.join(keyword)}', got end of file")
        n, toks = lines[pos]
        k = len(keyword)
        if tuple(toks[:k]) != keyword or len(toks) != k + nvals:
            raise ParseError(n, f"expected '{' '.join(keyword)}' followed by {nvals} value(s)")
        pos += 1
        return n, _ints(toks[k:], n)

    n, (w, h, layers) = take(("grid",), 3)
    if layers != 2:
        raise ParseError(n, f"only 2-layer grids are supported, got {layers}")
    if w < 1 or h < 1:
        raise ParseError(n, "grid dimensions must be positive")
    _, (cv,) = take(("vertical", "capacity"), 1)
    _, (ch,) = take(("horizontal", "capacity"), 1)
    problem = Problem(w, h, cv, ch)
    _, (num_nets,) = take(("num", "net"), 1)

    names: set[str] = set()
    for _ in range(num_nets):
        if pos >= len(lines):
            raise ParseError(lines[-1][0] + 1, "unexpected end of file in net list")
        n, toks = lines[pos]
        pos += 1
        if len(toks) != 3:
            raise ParseError(n, "net header must be '<name> <id> <pin_count>'")
        name = toks[0]
        net_id, pin_count = _ints(toks[1:], n)
        if name in names:
            raise ParseError(n, f"duplicate net name {name!r}")
        if pin_count < 1:
            raise ParseError(n, f"net {name!r} has no pins")
        names.add(name)
        pins = []
        for _ in range(pin_count):
            if pos >= len(lines):
                raise ParseError(n, f"net {name!r} is missing pins")
            pn, ptoks = lines[pos]
            pos += 1
            if len(ptoks) != 3:
                raise ParseError(pn, "pin line must be 'x y z'")
            x, y, z = _ints(ptoks, pn)
            pin = Gcell(x, y, z - 1)
            if not problem.in_bounds(pin):
                raise ParseError(pn, f"pin ({x} {y} {z}) of net {name!r} is out of bounds")
            pins.append(pin)
        problem.nets.append(Net(name, net_id, pins))

    if pos < len(lines):
        _, (k,) = take(("num", "reduced", "edges"), 1)
        seen = set()
        for _ in range(k):
            if pos >= len(lines):
                raise ParseError(lines[-1][0] + 1, "unexpected end of file in reduced edge list")
            rn, rtoks = lines[pos]
            pos += 1
            if len(rtoks) != 7:
                raise ParseError(rn, "reduced edge line must be 'x1 y1 z1 x2 y2 z2 cap'")
            v = _ints(rtoks, rn)
            a, b, value = Gcell(v[0], v[1], v[2] - 1), Gcell(v[3], v[4], v[5] - 1), v[6]
            if not (problem.in_bounds(a) and problem.in_bounds(b)):
                raise ParseError(rn, "reduced edge endpoint out of bounds")
            if manhattan(a, b) != 1:
                raise ParseError(rn, "reduced edge endpoints are not adjacent")
            if value < 0:
                raise ParseError(rn, f"negative capacity {value}")
            e = edge_id(a, b)
            if e in seen:
                raise ParseError(rn, "duplicate reduced edge")
            seen.add(e)
            problem.reduced_edges.append((e, value))
    if pos < len(lines):
        raise ParseError(lines[pos][0], "trailing content after reduced edge list")
    return problem


def write_problem(p: Problem) -> str:
    out = [
        f"grid {p.width} {p.height} {p.layers}",
        f"vertical capacity {p.vertical_capacity}",
        f"horizontal capacity {p.horizontal_capacity}",
        f"num net {len(p.nets)}",
    ]
    for net in p.nets:
        out.append(f"{net.name} {net.id} {len(net.pins)}")
        out.extend(f"{x} {y} {z + 1}" for x, y, z in net.pins)
    out.append(f"num reduced edges {len(p.reduced_edges)}")
    for (a, b), value in p.reduced_edges:
        out.append(f"{a.x} {a.y} {a.z + 1} {b.x} {b.y} {b.z + 1} {value}")
    return "\n".join(out) + "\n"


_SEGMENT = re.compile(r"^\((-?\d+),(-?\d+),(-?\d+)\)-\((-?\d+),(-?\d+),(-?\d+)\)$")


def _fmt(c: Gcell) -> str:
    return f"({c.x},{c.y},{c.z + 1})"


def write_solution(s: RouteSolution) -> str:
    out = []
    for net in s.nets:
        out.append(f"{net.name} {net.id}")
        out.extend(f"{_fmt(a)}-{_fmt(b)}" for a, b in net.segments)
        out.append("!")
    return "".join(line + "\n" for line in out)


def parse_solution(text: str) -> RouteSolution:
    sol = RouteSolution()
    current: NetRoute | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if current is None:
            toks = line.split()
            if len(toks) != 2:
                raise ParseError(lineno, "net header must be '<name> <id>'")
            (net_id,) = _ints(toks[1:], lineno)
            current = NetRoute(toks[0], net_id)
        elif line == "!":
            sol.nets.append(current)
            current = None
        else:
            m = _SEGMENT.match(line)
            if not m:
                raise ParseError(lineno, f"malformed segment {line!r}")
            v = [int(t) for t in m.groups()]
            a, b = Gcell(v[0], v[1], v[2] - 1), Gcell(v[3], v[4], v[5] - 1)
            if manhattan(a, b) != 1:
                raise ParseError(lineno, f"segment endpoints {a} and {b} are not adjacent")
            current.segments.append((a, b))
    if current is not None:
        raise ParseError(len(text.splitlines()), f"net {current.name!r} is not terminated by '!'")
    return sol
