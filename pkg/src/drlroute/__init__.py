"""Global routing on 2-layer grid graphs with A* and a deep Q-network."""

from importlib.metadata import PackageNotFoundError, version

from .astar import route_problem, route_two_pin
from .decompose import decompose, decompose_all
from .dqn import QNetwork, TrainConfig, TrainResult, train
from .env import RoutingEnv
from .evaluate import ProblemType, classify, compare, overflow, report, wirelength
from .generator import GenSpec, generate
from .grid import Gcell, GridGraph
from .problem_io import Net, NetRoute, Problem, RouteSolution, parse_problem, parse_solution, write_problem, write_solution

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.1.0"

__all__ = [
    "Gcell",
    "GenSpec",
    "GridGraph",
    "Net",
    "NetRoute",
    "Problem",
    "ProblemType",
    "QNetwork",
    "RouteSolution",
    "RoutingEnv",
    "TrainConfig",
    "TrainResult",
    "classify",
    "compare",
    "decompose",
    "decompose_all",
    "generate",
    "overflow",
    "parse_problem",
    "parse_solution",
    "report",
    "route_problem",
    "route_two_pin",
    "train",
    "wirelength",
    "write_problem",
    "write_solution",
]
