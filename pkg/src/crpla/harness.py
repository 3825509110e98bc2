"""Experiment configuration, seeding, episode simulation and CSV output."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .auth import VerifierConfig, accepts, analytic_pmd, simulate_det
from .channel import (SPEED_OF_LIGHT, ChannelMap, GridSpec, ShadowingParams, attenuation_range,
                      build_channel_map, map_rows)
from .policy import POLICY_KINDS, EnergyModel, PolicyTable, StdPolicy, make_policy

# Fixed sub-stream keys derived from the master seed.
STREAMS = {"map": 0, "det": 1, "episode": 2, "compare": 3}


class ConfigError(ValueError):
    """Invalid or unreadable experiment configuration."""


@dataclass(frozen=True)
class PolicyParams:
    kind: str = "bi"
    gamma: float = 0.95
    tol: float = 1e-6
    max_iters: int = 10_000
    window_l: int = 5
    delta: float = 100.0
    beta: float = 20.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"policy kind must be one of {POLICY_KINDS}, got {self.kind!r}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def hyper(self) -> dict:
        d = asdict(self)
        d.pop("kind")
        return d


@dataclass(frozen=True)
class DetParams:
    r_values: tuple = (5.0, 10.0, 20.0, 40.0)
    p_fa_grid: tuple = (0.5, math.exp(-1), 0.1, 0.05, 0.01)
    trials: int = 100_000


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    shadowing: ShadowingParams = field(default_factory=ShadowingParams)
    num_levels: int = 10
    energy: EnergyModel = field(default_factory=EnergyModel)
    p_fa: float = 0.05
    policy: PolicyParams = field(default_factory=PolicyParams)
    det: DetParams = field(default_factory=DetParams)
    episode_length: int = 100
    num_starts: int = 200
    attack_schedule: str | tuple = "h0"
    seed: int = 0

    def __post_init__(self):
        if self.episode_length < 0:
            raise ValueError("episode_length must be >= 0")
        if self.num_starts < 1:
            raise ValueError("num_starts must be >= 1")
        if self.num_levels < 2:
            raise ValueError("num_levels must be >= 2")
        VerifierConfig(self.p_fa)
        attack_schedule_flags(self.attack_schedule, self.episode_length)

    @property
    def verifier(self) -> VerifierConfig:
        return VerifierConfig(self.p_fa)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=seed)


_SECTIONS = {"grid": GridSpec, "shadowing": ShadowingParams, "energy": EnergyModel,
             "policy": PolicyParams, "det": DetParams}


def _build(cls, raw: dict, where: str):
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    kwargs = {}
    for k, v in raw.items():
        if k in _SECTIONS and cls is ExperimentConfig:
            v = _build(_SECTIONS[k], v, f"{where}.{k}")
        elif isinstance(v, list):
            v = tuple(v)
        kwargs[k] = v
    return cls(**kwargs)


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from parsed JSON. Missing keys take the defaults.

    ``shadowing.d_coh`` defaults to ten carrier wavelengths of the grid's
    carrier frequency. ``shadowing.seed`` is ignored in favour of a value
    derived from the master seed.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    raw = dict(raw)
    grid, shadow = raw.get("grid", {}), raw.get("shadowing", {})
    if isinstance(grid, dict) and isinstance(shadow, dict) and "d_coh" not in shadow:
        freq = grid.get("carrier_freq", GridSpec.carrier_freq)
        if isinstance(freq, (int, float)) and freq > 0:
            raw["shadowing"] = {**shadow, "d_coh": 10 * SPEED_OF_LIGHT / freq}
    try:
        return _build(ExperimentConfig, raw, "config")
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return config_from_dict(raw)


def config_to_dict(config: ExperimentConfig) -> dict:
    d = asdict(config)
    d["shadowing"].pop("seed")
    return d


def seed_sequence(master: int, stream: str) -> np.random.SeedSequence:
    return np.random.SeedSequence(master, spawn_key=(STREAMS[stream],))


def stream_rng(master: int, stream: str) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(master, stream))


def map_seed(master: int) -> int:
    return int(seed_sequence(master, "map").generate_state(1, dtype=np.uint64)[0])


def make_map(config: ExperimentConfig) -> ChannelMap:
    params = replace(config.shadowing, seed=map_seed(config.seed))
    return build_channel_map(config.grid, params, config.num_levels)


def attack_schedule_flags(schedule, length: int) -> np.ndarray:
    """Per-step attack flags (True = H1) from ``"h0"``, ``"h1"``, ``"alternate"`` or a list."""
    if isinstance(schedule, str):
        if schedule == "h0":
            return np.zeros(length, dtype=bool)
        if schedule == "h1":
            return np.ones(length, dtype=bool)
        if schedule == "alternate":
            return np.arange(length) % 2 == 1
        raise ValueError(f"unknown attack schedule {schedule!r}")
    flags = np.asarray(schedule, dtype=bool)
    if flags.shape != (length,):
        raise ValueError(f"attack schedule has {flags.size} flags, episode has {length} steps")
    return flags


@dataclass
class EpisodeTrace:
    """Per-step record of one protocol run; step ``t`` moves the drone to
    ``position_after[t-1]`` to realize ``challenge[t-1]``."""

    t: np.ndarray
    challenge: np.ndarray
    position_before: np.ndarray
    position_after: np.ndarray
    energy: np.ndarray
    observed: np.ndarray
    attacked: np.ndarray
    accepted: np.ndarray
    start: int

    def __len__(self):
        return self.t.size

    @property
    def total_energy(self) -> float:
        return float(self.energy.sum())

    def rows(self, grid: GridSpec):
        xy = grid.coords()
        for i in range(len(self)):
            a, b = self.position_before[i], self.position_after[i]
            yield (int(self.t[i]), float(self.challenge[i]), int(a), int(b),
                   float(xy[a, 0]), float(xy[a, 1]), float(xy[b, 0]), float(xy[b, 1]),
                   float(self.energy[i]), float(self.observed[i]),
                   "H1" if self.attacked[i] else "H0",
                   "accept" if self.accepted[i] else "reject")


TRACE_HEADER = ("t", "challenge_db", "from_index", "to_index", "from_x", "from_y",
                "to_x", "to_y", "energy_j", "observed_db", "hypothesis", "decision")


def run_episode(config: ExperimentConfig, chmap: ChannelMap, policy, attack_schedule,
                rng: np.random.Generator, start: int | None = None) -> EpisodeTrace:
    """Run ``config.episode_length`` challenge/response/verification rounds.

    All randomness is drawn up front in a fixed order (start, challenges,
    fading, attacker guesses), so two policies fed equally seeded generators
    see identical starts and challenge streams.
    """
    if not np.array_equal(np.asarray(policy.challenges), np.asarray(chmap.challenges)):
        raise ValueError("policy was built for a different challenge set")
    T = config.episode_length
    attacked = attack_schedule_flags(attack_schedule, T)
    grid = chmap.grid
    x0 = int(rng.integers(grid.size))
    if start is not None:
        grid.check_index(start)
        x0 = int(start)
    ch_idx = rng.integers(len(chmap.challenges), size=T)
    fading = rng.exponential(1.0, size=T)
    lo, hi = float(chmap.quantized.min()), float(chmap.quantized.max())
    guesses = rng.uniform(lo, hi, size=T)

    before = np.empty(T, dtype=np.int64)
    after = np.empty(T, dtype=np.int64)
    x = x0
    for i in range(T):
        before[i] = x
        x = policy(x, int(ch_idx[i]), i + 1)
        after[i] = x
    xy = grid.coords()
    d = xy[after] - xy[before]
    spent = config.energy.of_distance(np.hypot(d[:, 0], d[:, 1]))
    challenge = np.asarray(chmap.challenges)[ch_idx]
    observed = np.where(attacked, guesses, challenge + fading)
    return EpisodeTrace(
        t=np.arange(1, T + 1), challenge=challenge, position_before=before,
        position_after=after, energy=spent, observed=observed, attacked=attacked,
        accepted=accepts(observed, challenge, config.verifier), start=x0,
    )


def build_policies(config: ExperimentConfig, chmap: ChannelMap, kinds=POLICY_KINDS) -> dict:
    hyper = config.policy.hyper()
    return {k: make_policy(k, chmap, config.energy, **hyper) for k in kinds}


@dataclass
class PolicyComparison:
    energies: dict  # kind -> (num_starts, T) per-step energy
    starts: np.ndarray

    def mean(self, kind: str) -> np.ndarray:
        return self.energies[kind].mean(axis=0)

    def std(self, kind: str) -> np.ndarray:
        e = self.energies[kind]
        return e.std(axis=0, ddof=1) if e.shape[0] > 1 else np.zeros(e.shape[1])


def compare_policies(config: ExperimentConfig, chmap: ChannelMap, rng: np.random.Generator | None = None,
                     policies: dict | None = None) -> PolicyComparison:
    """Run every policy from the same random starts with common random numbers."""
    if policies is None:
        policies = build_policies(config, chmap)
    root = np.random.SeedSequence(int(rng.integers(2**63))) if rng is not None else seed_sequence(config.seed, "compare")
    children = root.spawn(config.num_starts)
    energies, starts = {}, None
    for kind, pol in policies.items():
        traces = [run_episode(config, chmap, pol, "h0", np.random.default_rng(ss)) for ss in children]
        energies[kind] = np.array([tr.energy for tr in traces]).reshape(config.num_starts, config.episode_length)
        s = np.array([tr.start for tr in traces])
        if starts is not None and not np.array_equal(s, starts):
            raise RuntimeError("common random numbers violated: starts differ between policies")
        starts = s
    return PolicyComparison(energies, starts)


def det_rows(config: ExperimentConfig, rng: np.random.Generator | None = None):
    """Rows ``(r_db, p_fa_target, p_fa_emp, p_md_analytic, p_md_emp, trials, seed)``."""
    rng = rng if rng is not None else stream_rng(config.seed, "det")
    trials = config.det.trials
    for r in config.det.r_values:
        for p_fa, fa, md in simulate_det(r, config.det.p_fa_grid, trials, rng):
            yield (float(r), p_fa, fa, analytic_pmd(r, p_fa), md, trials, config.seed)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc
    return path


MAP_HEADER = ("x_m", "y_m", "eta_db", "quantized_db")
DET_HEADER = ("r_db", "p_fa_target", "p_fa_emp", "p_md_analytic", "p_md_emp", "trials", "seed")
ENERGY_HEADER = ("policy", "t", "mean_energy_j", "std_energy_j", "num_starts")
TRAJ_HEADER = ("policy",) + TRACE_HEADER
POLICY_HEADER = ("challenge_db", "from_x", "from_y", "to_x", "to_y", "value")
SOLVER_HEADER = ("iteration", "max_delta")


def policy_rows(table: PolicyTable, grid: GridSpec):
    xy = grid.coords()
    values = table.values
    for k, a in enumerate(table.challenges):
        for x in range(grid.size):
            v = table.next_position[x, k]
            val = values[x, k] if values is not None else ""
            yield (float(a), float(xy[x, 0]), float(xy[x, 1]), float(xy[v, 0]), float(xy[v, 1]), val)


def emit_figure_data(kind: str, out_dir, config: ExperimentConfig, *, chmap: ChannelMap | None = None,
                     policies: dict | None = None, comparison: PolicyComparison | None = None,
                     plot: bool = False) -> list[Path]:
    """Write the CSV for one figure kind (``map``, ``det``, ``trajectory``, ``energy``).

    Plots, when requested, are rendered from the CSV inputs after writing
    and never change them.
    """
    out = Path(out_dir)
    written = []
    if kind == "map":
        chmap = chmap if chmap is not None else make_map(config)
        written.append(write_csv(out / "map.csv", MAP_HEADER, map_rows(chmap)))
    elif kind == "det":
        written.append(write_csv(out / "det.csv", DET_HEADER, det_rows(config)))
    elif kind == "trajectory":
        chmap = chmap if chmap is not None else make_map(config)
        policies = policies if policies is not None else build_policies(config, chmap)
        ss = seed_sequence(config.seed, "episode")

        def rows():
            for name, pol in policies.items():
                tr = run_episode(config, chmap, pol, "h0", np.random.default_rng(ss))
                for row in tr.rows(chmap.grid):
                    yield (name,) + row
        written.append(write_csv(out / "trajectory.csv", TRAJ_HEADER, rows()))
    elif kind == "energy":
        if comparison is None:
            chmap = chmap if chmap is not None else make_map(config)
            comparison = compare_policies(config, chmap, policies=policies)

        def rows():
            for name in comparison.energies:
                m, s = comparison.mean(name), comparison.std(name)
                for t in range(m.size):
                    yield (name, t + 1, m[t], s[t], config.num_starts)
        written.append(write_csv(out / "energy.csv", ENERGY_HEADER, rows()))
    else:
        raise ValueError(f"unknown figure kind {kind!r}")
    if plot:
        from .plotting import plot_csv
        written.append(plot_csv(kind, written[0]))
    return written


def security_summary(chmap: ChannelMap, config: ExperimentConfig) -> dict:
    r = attenuation_range(chmap)
    return {"r_db": r, "p_fa": config.p_fa, "p_md": analytic_pmd(r, config.p_fa) if r > 0 else 0.0}
