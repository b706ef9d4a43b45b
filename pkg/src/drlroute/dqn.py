"""Deep Q-network router.

A 12-32-64-32-6 ReLU network trained online on one problem: every
environment step stores a transition, samples a minibatch from the replay
buffer and takes one gradient step on the squared TD error. Targets come
from the live network (no separate target network).
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .astar import merge_paths, route_problem
from .decompose import decompose_all
from .env import STATE_DIM, RoutingEnv, Transition, legal_actions
from .evaluate import overflow
from .grid import N_ACTIONS
from .problem_io import Problem, RouteSolution

log = logging.getLogger(__name__)

LAYER_SIZES = (STATE_DIM, 32, 64, 32, N_ACTIONS)


class TrainingDiverged(FloatingPointError):
    pass


class QNetwork:
    """Fully-connected Q-value approximator.

    All weights live in one flat float64 vector ``flat`` laid out layer by
    layer as ``W1, b1, W2, b2, ...`` (each row-major, ``W`` of shape
    ``(fan_in, fan_out)``); ``params`` holds reshaped views into it. Hidden
    layers use ReLU; the output layer is linear.
    """

    def __init__(self, flat: np.ndarray, sizes=LAYER_SIZES):
        self.sizes = tuple(sizes)
        self.flat = np.ascontiguousarray(flat, dtype=np.float64)
        if self.flat.size != param_count(self.sizes):
            raise ValueError(f"{self.flat.size} values given, layers {self.sizes} need {param_count(self.sizes)}")
        self.params = _views(self.flat, self.sizes)
        self._grad_flat = np.zeros_like(self.flat)
        self._grads = _views(self._grad_flat, self.sizes)

    @classmethod
    def initialize(cls, rng: np.random.Generator, sizes=LAYER_SIZES) -> QNetwork:
        parts = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            parts.append(rng.uniform(-bound, bound, size=fan_in * fan_out))
            parts.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(np.concatenate(parts), sizes)

    @classmethod
    def zeros(cls, sizes=LAYER_SIZES) -> QNetwork:
        return cls(np.zeros(param_count(sizes)), sizes)

    def copy(self) -> QNetwork:
        return QNetwork(self.flat.copy(), self.sizes)

    def forward(self, states: np.ndarray) -> np.ndarray:
        p = self.params
        h = states
        last = len(p) - 2
        for i in range(0, last, 2):
            h = np.dot(h, p[i])
            h += p[i + 1]
            np.maximum(h, 0.0, out=h)
        out = np.dot(h, p[last])
        out += p[last + 1]
        return out

    def _forward_cached(self, x: np.ndarray):
        """Forward pass keeping each layer's input (post-activation)."""
        p = self.params
        acts = [x]
        h = x
        last = len(p) - 2
        for i in range(0, last, 2):
            h = np.dot(h, p[i])
            h += p[i + 1]
            np.maximum(h, 0.0, out=h)
            acts.append(h)
        out = np.dot(h, p[last])
        out += p[last + 1]
        return out, acts

    def _backward(self, acts, dq: np.ndarray) -> np.ndarray:
        """Gradient w.r.t. ``flat`` given dLoss/dQ for the first ``len(dq)`` rows.

        Returns an internal buffer that the next call overwrites.
        """
        p, g = self.params, self._grads
        n = len(dq)
        delta = dq
        for i in range(len(p) - 2, -1, -2):
            a = acts[i // 2][:n]
            np.dot(a.T, delta, out=g[i])
            np.add.reduce(delta, axis=0, out=g[i + 1])
            if i:
                # a > 0 is exactly where the ReLU that produced a was active
                delta = np.dot(delta, p[i].T)
                delta *= a > 0
        return self._grad_flat

    def loss_and_grad(self, states, actions, targets) -> tuple[float, np.ndarray]:
        """Mean squared error between ``targets`` and Q(s, a), with its flat gradient.

        Targets are treated as constants.
        """
        q, acts = self._forward_cached(np.asarray(states, dtype=np.float64))
        n = len(actions)
        rows = np.arange(n)
        diff = q[rows, actions] - targets
        dq = np.zeros_like(q)
        dq[rows, actions] = (2.0 / n) * diff
        return float(diff @ diff) / n, self._backward(acts, dq).copy()

    def to_bytes(self) -> bytes:
        return self.flat.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, sizes=LAYER_SIZES) -> QNetwork:
        flat = np.frombuffer(data, dtype="<f8")
        if flat.size != param_count(sizes):
            raise ValueError(f"weight blob has {flat.size} values, expected {param_count(sizes)} for layers {tuple(sizes)}")
        return cls(flat.astype(np.float64), sizes)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path, sizes=LAYER_SIZES) -> QNetwork:
        return cls.from_bytes(Path(path).read_bytes(), sizes)


def param_count(sizes) -> int:
    return sum(i * o + o for i, o in zip(sizes, sizes[1:]))


def _views(flat: np.ndarray, sizes) -> list[np.ndarray]:
    out, pos = [], 0
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        out.append(flat[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out))
        pos += fan_in * fan_out
        out.append(flat[pos : pos + fan_out])
        pos += fan_out
    return out


def forward(net: QNetwork, state) -> np.ndarray:
    return net.forward(np.asarray(state, dtype=np.float64))


class SGD:
    def __init__(self, lr: float = 1e-4):
        self.lr = lr

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        params -= self.lr * grad


class Adam:
    """Adaptive moment estimation on a flat parameter vector."""

    def __init__(self, lr: float = 1e-4, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m: np.ndarray | None = None
        self.v: np.ndarray | None = None
        self._tmp: np.ndarray | None = None

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        if self.m is None:
            self.m, self.v, self._tmp = (np.zeros_like(params) for _ in range(3))
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        m, v, tmp = self.m, self.v, self._tmp
        m *= b1
        np.multiply(grad, 1 - b1, out=tmp)
        m += tmp
        v *= b2
        np.multiply(grad, grad, out=tmp)
        tmp *= 1 - b2
        v += tmp
        np.sqrt(v, out=tmp)
        tmp += self.eps
        np.divide(m, tmp, out=tmp)
        tmp *= self.lr * np.sqrt(1 - b2**self.t) / (1 - b1**self.t)
        params -= tmp
        if self.t % 4096 == 0:
            # moments of long-dead units decay into subnormals, which are slow
            m[np.abs(m) < 1e-150] = 0.0
            v[v < 1e-150] = 0.0


def make_optimizer(name: str, lr: float):
    if name == "adam":
        return Adam(lr)
    if name == "sgd":
        return SGD(lr)
    raise ValueError(f"unknown optimizer {name!r}")


class ReplayBuffer:
    """Bounded FIFO of transitions stored column-wise in preallocated arrays."""

    def __init__(self, capacity: int, state_dim: int = STATE_DIM):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.terminal = np.zeros(capacity, dtype=bool)
        self.size = 0
        self._next = 0

    def __len__(self) -> int:
        return self.size

    def add(self, state, action, reward, next_state, is_terminal) -> None:
        i = self._next
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self.terminal[i] = is_terminal
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def extend(self, transitions) -> None:
        for t in transitions:
            self.add(*t)

    def oldest_first(self) -> np.ndarray:
        """Storage indices ordered from oldest to newest."""
        if self.size < self.capacity:
            return np.arange(self.size)
        return (np.arange(self.capacity) + self._next) % self.capacity

    def get(self, i: int) -> Transition:
        return Transition(self.states[i], int(self.actions[i]), float(self.rewards[i]), self.next_states[i], bool(self.terminal[i]))

    def sample_indices(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` distinct indices, uniform over the stored transitions."""
        if n >= self.size:
            return rng.permutation(self.size)
        if self.size < 16 * n * n:
            # collisions are likely, rejection would spin
            return rng.choice(self.size, size=n, replace=False)
        while True:
            idx = rng.integers(0, self.size, size=n)
            if len(set(idx.tolist())) == n:
                return idx

    def sample(self, n: int, rng: np.random.Generator):
        idx = self.sample_indices(n, rng)
        return self.states[idx], self.actions[idx], self.rewards[idx], self.next_states[idx], self.terminal[idx]


def select_action(net: QNetwork, state, eps: float, legal, rng: np.random.Generator) -> int:
    """Epsilon-greedy over ``legal``; greedy ties go to the lowest action code."""
    legal = list(legal)
    if not legal:
        raise ValueError("no legal action to select")
    if rng.random() < eps:
        return legal[int(rng.integers(len(legal)))]
    return greedy_action(net.forward(np.asarray(state, dtype=np.float64)), legal)


def greedy_action(q: np.ndarray, legal) -> int:
    best, best_q = -1, -np.inf
    for a in legal:  # ascending order, strict > keeps the lowest code on ties
        if q[a] > best_q:
            best, best_q = a, q[a]
    return best if best >= 0 else min(legal)


def td_targets(next_q: np.ndarray, rewards, next_states, terminal, gamma: float, masked: bool = True) -> np.ndarray:
    """``r`` for terminal transitions, else ``r + gamma * max_a' Q(s', a')``.

    With ``masked`` the max runs over the actions legal in ``s'`` (positive
    capacity entries); a next state with no legal move bootstraps nothing.
    """
    if masked:
        legal = next_states[:, 6:] > 0
        best = np.where(legal, next_q, -np.inf).max(axis=1)
        best[~legal.any(axis=1)] = 0.0
    else:
        best = next_q.max(axis=1)
    best *= gamma
    best[terminal] = 0.0
    best += rewards
    return best


def train_batch(net: QNetwork, batch, gamma: float, optimizer, masked: bool = True) -> float:
    """One gradient step on a ``(states, actions, rewards, next_states, terminal)`` batch."""
    states, actions, rewards, next_states, terminal = batch
    n = len(actions)
    if n == 0:
        raise ValueError("empty batch")
    q, acts = net._forward_cached(np.concatenate((states, next_states)))
    targets = td_targets(q[n:], rewards, next_states, terminal, gamma, masked)
    rows = np.arange(n)
    diff = q[rows, actions] - targets
    loss = float(np.dot(diff, diff)) / n
    if not np.isfinite(loss):
        raise TrainingDiverged(f"non-finite loss {loss}")
    dq = np.zeros((n, q.shape[1]))
    dq[rows, actions] = (2.0 / n) * diff
    optimizer.step(net.flat, net._backward(acts, dq))
    return loss


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    batch_size: int = 32
    buffer_size: int = 50000
    burn_in_size: int = 10000
    gamma: float = 0.9
    epsilon: float = 0.05
    max_episodes: int = 5000
    t_max: int = 50
    burn_in_mode: str = "astar"  # or "random"
    seed: int = 0
    optimizer: str = "adam"
    masked_targets: bool = True
    # linear epsilon decay, off by default
    epsilon_decay: bool = False
    epsilon_final: float = 0.01
    decay_start: int = 2000
    # also try an eps = 0 rollout every this many episodes (0 = never)
    greedy_every: int = 0

    def validate(self) -> None:
        if not 0 <= self.gamma <= 1:
            raise ValueError("gamma must lie in [0, 1]")
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.burn_in_mode not in ("astar", "random"):
            raise ValueError(f"unknown burn_in_mode {self.burn_in_mode!r}")
        if self.batch_size < 1 or self.buffer_size < 1 or self.max_episodes < 1 or self.t_max < 1:
            raise ValueError("batch_size, buffer_size, max_episodes and t_max must be >= 1")
        if self.burn_in_size < 0:
            raise ValueError("burn_in_size must be >= 0")

    def epsilon_at(self, episode: int) -> float:
        if not self.epsilon_decay or episode < self.decay_start:
            return self.epsilon
        span = max(self.max_episodes - 1 - self.decay_start, 1)
        frac = min((episode - self.decay_start) / span, 1.0)
        return self.epsilon + frac * (self.epsilon_final - self.epsilon)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainResult:
    network: QNetwork
    rewards: np.ndarray         # summed task rewards per episode
    solved: np.ndarray          # per episode: every task reached its goal
    task_rewards: np.ndarray    # (episodes, tasks) cumulative reward per task
    task_solved: np.ndarray     # (episodes, tasks)
    task_steps: np.ndarray      # (episodes, tasks)
    best_solution: RouteSolution | None
    best_wl: int | None = None
    best_of: int | None = None
    best_episode: int | None = None
    best_is_greedy: bool = False
    greedy_wl: list[tuple[int, int]] = field(default_factory=list)  # (episode, WL) of solved rollouts

    @property
    def found_solution(self) -> bool:
        return self.best_solution is not None


def random_walk_transitions(problem: Problem, tasks, n: int, t_max: int, rng) -> list[Transition]:
    """Transitions from uniformly random legal walks, cycling through the tasks."""
    grid = problem.build_grid()
    original = grid.snapshot()
    env = RoutingEnv(grid, t_max)
    out: list[Transition] = []
    while len(out) < n:
        grid.restore(original)
        for task in tasks:
            s = env.reset(task)
            done = env.done
            while not done:
                legal = legal_actions(s)
                a = legal[int(rng.integers(len(legal)))]
                s2, r, done = env.step(a)
                out.append(Transition(s, a, r, s2, env.solved))
                s = s2
            if len(out) >= n:
                break
    return out[:n]


def burn_in_transitions(problem: Problem, cfg: TrainConfig, tasks, rng) -> list[Transition]:
    if cfg.burn_in_size == 0:
        return []
    if cfg.burn_in_mode == "random":
        return random_walk_transitions(problem, tasks, cfg.burn_in_size, cfg.t_max, rng)
    _, trans = route_problem(problem)
    if not trans:
        return []
    reps = -(-cfg.burn_in_size // len(trans))
    return (trans * reps)[: cfg.burn_in_size]


def greedy_rollout(net: QNetwork, problem: Problem, tasks, grid, t_max: int):
    """Route every task with eps = 0 without training.

    Returns ``(all_solved, wirelength, paths)``; ``grid`` is consumed in place.
    """
    env = RoutingEnv(grid, t_max)
    paths, wl, ok = [], 0, True
    for task in tasks:
        s = env.reset(task)
        done = env.done
        while not done:
            s, _, done = env.step(greedy_action(net.forward(s), legal_actions(s)))
        ok &= env.solved
        wl += env.steps
        paths.append(env.path)
    return ok, wl, paths


def reward_curve_csv(rewards) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["episode", "reward"])
    for i, r in enumerate(rewards, 1):
        w.writerow([i, f"{r:g}"])
    return buf.getvalue()


def train(problem: Problem, cfg: TrainConfig, progress_every: int = 0) -> TrainResult:
    """Train a Q-network on one problem and keep the best complete episode.

    Among episodes in which every two-pin task reached its goal, the one with
    the smallest (overflow, wirelength) is returned as the solution.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    tasks = decompose_all(problem)
    grid = problem.build_grid()
    original = grid.snapshot()
    env = RoutingEnv(grid, cfg.t_max)

    net = QNetwork.initialize(rng)
    opt = make_optimizer(cfg.optimizer, cfg.learning_rate)
    buf = ReplayBuffer(cfg.buffer_size)
    buf.extend(burn_in_transitions(problem, cfg, tasks, rng))

    n_ep, n_tasks = cfg.max_episodes, len(tasks)
    rewards = np.zeros(n_ep)
    solved = np.zeros(n_ep, dtype=bool)
    task_rewards = np.zeros((n_ep, n_tasks))
    task_solved = np.zeros((n_ep, n_tasks), dtype=bool)
    task_steps = np.zeros((n_ep, n_tasks), dtype=np.int64)
    best = None
    best_key = None
    best_ep = None
    best_greedy = False
    greedy_wl: list[tuple[int, int]] = []
    gamma, bs, masked = cfg.gamma, cfg.batch_size, cfg.masked_targets
    forward_q = net.forward

    for ep in range(n_ep):
        eps = cfg.epsilon_at(ep)
        grid.restore(original)
        paths = []
        for k, task in enumerate(tasks):
            s = env.reset(task)
            total = 0.0
            done = env.done
            while not done:
                legal = legal_actions(s)
                if rng.random() < eps:
                    a = legal[int(rng.integers(len(legal)))]
                else:
                    a = greedy_action(forward_q(s), legal)
                s2, r, done = env.step(a)
                buf.add(s, a, r, s2, env.solved)
                train_batch(net, buf.sample(bs, rng), gamma, opt, masked)
                total += r
                s = s2
            task_rewards[ep, k] = total
            task_solved[ep, k] = env.solved
            task_steps[ep, k] = env.steps
            paths.append(env.path)
        rewards[ep] = task_rewards[ep].sum()
        solved[ep] = task_solved[ep].all()
        if solved[ep]:
            wl = int(task_steps[ep].sum())
            if best_key is None or (0, wl) < best_key:
                sol = merge_paths(problem, tasks, paths)
                key = (overflow(problem, sol), wl)
                if best_key is None or key < best_key:
                    best, best_key, best_ep, best_greedy = sol, key, ep, False
        if cfg.greedy_every and (ep + 1) % cfg.greedy_every == 0:
            grid.restore(original)
            ok, wl, gpaths = greedy_rollout(net, problem, tasks, grid, cfg.t_max)
            if ok:
                greedy_wl.append((ep, wl))
                if best_key is None or (0, wl) < best_key:
                    sol = merge_paths(problem, tasks, gpaths)
                    key = (overflow(problem, sol), wl)
                    if best_key is None or key < best_key:
                        best, best_key, best_ep, best_greedy = sol, key, ep, True
        if progress_every and (ep + 1) % progress_every == 0:
            log.info(
                "episode %d reward %.0f solved %d/%d best %s",
                ep + 1, rewards[ep], task_solved[ep].sum(), n_tasks, best_key,
            )

    return TrainResult(
        net,
        rewards,
        solved,
        task_rewards,
        task_solved,
        task_steps,
        best,
        None if best_key is None else best_key[1],
        None if best_key is None else best_key[0],
        best_ep,
        best_greedy,
        greedy_wl,
    )
