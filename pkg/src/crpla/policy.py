"""Movement energy and the position-selection policies.

Three policies choose where the drone goes to realize a drawn challenge:

* ``bi``  - discounted-MDP optimum by Bellman value iteration,
* ``pg``  - the nearest position of the challenge class,
* ``std`` - nearest position traded off against a decaying bonus for local
  attenuation diversity (the strategic value ``Y``).

Challenges are handled internally by their index into
``ChannelMap.challenges``; the public ``*_next`` helpers take dB values.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .channel import ChannelMap, GridSpec

log = logging.getLogger(__name__)

# Scores closer than this to the best one count as ties (lowest index wins).
TIE_TOL = 1e-9


@dataclass(frozen=True)
class EnergyModel:
    alpha1: float = 308.71
    alpha0: float = 0.85
    velocity: float = 5.0

    def __post_init__(self):
        if not self.alpha1 > 0:
            raise ValueError("alpha1 must be positive")
        if not self.alpha0 >= 0:
            raise ValueError("alpha0 must be non-negative")
        if not self.velocity > 0:
            raise ValueError("velocity must be positive")

    def of_distance(self, distance):
        """Energy in J to fly ``distance`` meters, clamped at zero."""
        return np.maximum(0.0, self.alpha1 * np.asarray(distance, dtype=float) / self.velocity - self.alpha0)


def energy(src: int, dst: int, model: EnergyModel, grid: GridSpec) -> float:
    grid.check_index(src)
    grid.check_index(dst)
    (x0, y0), (x1, y1) = grid.coord(src), grid.coord(dst)
    return float(model.of_distance(np.hypot(x1 - x0, y1 - y0)))


def energy_to(src: int, dst: np.ndarray, model: EnergyModel, grid: GridSpec) -> np.ndarray:
    """Energy from one position to each of ``dst``."""
    xy = grid.coords()
    d = xy[dst] - xy[src]
    return model.of_distance(np.hypot(d[:, 0], d[:, 1]))


def energy_matrix(grid: GridSpec, model: EnergyModel, cols=None) -> np.ndarray:
    """Energy from every position (rows) to positions ``cols`` (all if None)."""
    xy = grid.coords()
    dst = xy if cols is None else xy[cols]
    dx = xy[:, 0, None] - dst[None, :, 0]
    dy = xy[:, 1, None] - dst[None, :, 1]
    return model.of_distance(np.hypot(dx, dy))


def _argbest(scores: np.ndarray, tol: float = TIE_TOL) -> int:
    """Position in ``scores`` of the maximum, lowest position among ties."""
    return int(np.flatnonzero(scores >= scores.max() - tol)[0])


def _argbest_rows(scores: np.ndarray, tol: float = TIE_TOL) -> np.ndarray:
    best = scores.max(axis=1, keepdims=True)
    return np.argmax(scores >= best - tol, axis=1)


@dataclass
class PolicyTable:
    """Solved state -> next-position table.

    ``next_position[x, k]`` is the position chosen from ``x`` when the drawn
    challenge is ``challenges[k]``.
    """

    kind: str
    next_position: np.ndarray
    challenges: np.ndarray
    values: np.ndarray | None = None
    gamma: float | None = None
    iterations_used: int = 0
    deltas: list = field(default_factory=list)

    def __call__(self, position: int, challenge_index: int, t: int = 0) -> int:
        return int(self.next_position[position, challenge_index])


def _check_classes(chmap: ChannelMap) -> None:
    if not chmap.classes or any(c.size == 0 for c in chmap.classes):
        raise ValueError("every challenge class must be non-empty")


def solve_value_iteration(chmap: ChannelMap, model: EnergyModel, gamma: float = 0.95,
                          tol: float = 1e-6, max_iters: int = 10_000) -> PolicyTable:
    """Bellman value iteration over states (position, challenge).

    ``V(x, a) = max_{v in X_a} [-eps(x, v) + gamma * U(v)]`` with
    ``U(v)`` the uniform average of ``V(v, .)`` over next challenges.
    Stops once the max-norm change drops below ``tol`` or after
    ``max_iters`` sweeps; values start at zero.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    _check_classes(chmap)
    n, m = chmap.size, len(chmap.classes)
    costs = [energy_matrix(chmap.grid, model, cls) for cls in chmap.classes]
    values = np.zeros((n, m))
    deltas = []
    it = 0
    while it < max_iters:
        u = values.mean(axis=1)
        new = np.empty_like(values)
        for k, cls in enumerate(chmap.classes):
            new[:, k] = (gamma * u[cls] - costs[k]).max(axis=1)
        delta = float(np.abs(new - values).max())
        values = new
        it += 1
        deltas.append(delta)
        if delta < tol:
            break
    else:
        log.warning("value iteration hit max_iters=%d (last delta %.3g)", max_iters, deltas[-1] if deltas else float("nan"))

    u = values.mean(axis=1)
    policy = np.empty((n, m), dtype=np.int64)
    for k, cls in enumerate(chmap.classes):
        policy[:, k] = cls[_argbest_rows(gamma * u[cls] - costs[k])]
    return PolicyTable("bi", policy, np.asarray(chmap.challenges), values, gamma, it, deltas)


def greedy_next(current: int, challenge: float, chmap: ChannelMap, model: EnergyModel) -> int:
    """Closest position (least energy) realizing ``challenge``."""
    chmap.grid.check_index(current)
    cls = chmap.class_of(challenge)
    return int(cls[_argbest(-energy_to(current, cls, model, chmap.grid))])


def solve_greedy(chmap: ChannelMap, model: EnergyModel) -> PolicyTable:
    _check_classes(chmap)
    n, m = chmap.size, len(chmap.classes)
    policy = np.empty((n, m), dtype=np.int64)
    for k, cls in enumerate(chmap.classes):
        policy[:, k] = cls[_argbest_rows(-energy_matrix(chmap.grid, model, cls))]
    return PolicyTable("pg", policy, np.asarray(chmap.challenges))


@dataclass(frozen=True)
class StrategicField:
    y: np.ndarray
    window_l: int
    delta: float = 100.0
    beta: float = 20.0

    def weight(self, t: float) -> float:
        return self.delta * np.exp(-t / self.beta)


def window_rss(values: np.ndarray, window_l: int) -> np.ndarray:
    """Root-sum-of-squares deviation from the mean over an L x L window.

    The window for a cell is the L x L block of cells closest to it; near the
    edges the block is shifted inward so it always holds L*L cells.
    """
    a = np.asarray(values, dtype=float)
    lr, lc = min(window_l, a.shape[0]), min(window_l, a.shape[1])
    win = sliding_window_view(a, (lr, lc))
    mu = win.sum(axis=(2, 3)) / (lr * lc)
    rss = np.sqrt(((win - mu[..., None, None]) ** 2).sum(axis=(2, 3)))
    rows = np.clip(np.arange(a.shape[0]) - lr // 2, 0, a.shape[0] - lr)
    cols = np.clip(np.arange(a.shape[1]) - lc // 2, 0, a.shape[1] - lc)
    return rss[np.ix_(rows, cols)]


def strategic_field(chmap: ChannelMap, window_l: int = 5, delta: float = 100.0,
                    beta: float = 20.0) -> StrategicField:
    """Strategic value ``Y`` of every position from the quantized map."""
    if window_l < 1 or window_l % 2 == 0:
        raise ValueError("window_l must be a positive odd integer")
    if not beta > 0:
        raise ValueError("beta must be positive")
    y = window_rss(np.asarray(chmap.quantized).reshape(chmap.grid.shape), window_l)
    return StrategicField(y.ravel(), window_l, delta, beta)


def std_scores(current: int, cls: np.ndarray, t: float, sfield: StrategicField,
               model: EnergyModel, grid: GridSpec) -> np.ndarray:
    return sfield.weight(t) * sfield.y[cls] - energy_to(current, cls, model, grid)


def std_next(current: int, challenge: float, t: float, sfield: StrategicField,
             chmap: ChannelMap, model: EnergyModel) -> int:
    if t < 0:
        raise ValueError("t must be non-negative")
    chmap.grid.check_index(current)
    cls = chmap.class_of(challenge)
    return int(cls[_argbest(std_scores(current, cls, t, sfield, model, chmap.grid))])


class StdPolicy:
    """Time-dependent STD-based policy bound to one map."""

    kind = "std"

    def __init__(self, chmap: ChannelMap, model: EnergyModel, sfield: StrategicField):
        _check_classes(chmap)
        self.chmap, self.model, self.field = chmap, model, sfield
        self.challenges = np.asarray(chmap.challenges)

    def __call__(self, position: int, challenge_index: int, t: int = 0) -> int:
        cls = self.chmap.classes[challenge_index]
        scores = std_scores(position, cls, t, self.field, self.model, self.chmap.grid)
        return int(cls[_argbest(scores)])

    def table(self, t: int = 0) -> PolicyTable:
        """Freeze the policy at step ``t`` into a table."""
        n, m = self.chmap.size, len(self.chmap.classes)
        policy = np.empty((n, m), dtype=np.int64)
        values = np.empty((n, m))
        w = self.field.weight(t)
        for k, cls in enumerate(self.chmap.classes):
            scores = w * self.field.y[cls][None, :] - energy_matrix(self.chmap.grid, self.model, cls)
            best = _argbest_rows(scores)
            policy[:, k] = cls[best]
            values[:, k] = scores[np.arange(n), best]
        return PolicyTable("std", policy, self.challenges, values)


POLICY_KINDS = ("bi", "pg", "std")


def make_policy(kind: str, chmap: ChannelMap, model: EnergyModel, *, gamma: float = 0.95,
                tol: float = 1e-6, max_iters: int = 10_000, window_l: int = 5,
                delta: float = 100.0, beta: float = 20.0):
    if kind == "bi":
        return solve_value_iteration(chmap, model, gamma, tol, max_iters)
    if kind == "pg":
        return solve_greedy(chmap, model)
    if kind == "std":
        return StdPolicy(chmap, model, strategic_field(chmap, window_l, delta, beta))
    raise ValueError(f"unknown policy kind {kind!r}; expected one of {POLICY_KINDS}")
