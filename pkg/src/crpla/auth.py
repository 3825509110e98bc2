"""Challenge drawing, logarithmic-test verification and security curves."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

Decision = Literal["accept", "reject"]


@dataclass(frozen=True)
class VerifierConfig:
    p_fa: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.p_fa < 1.0:
            raise ValueError(f"p_fa must lie in (0, 1), got {self.p_fa}")

    @property
    def interval(self) -> float:
        """Width of the acceptance interval above the challenge, ``-ln p_fa`` dB."""
        return -math.log(self.p_fa)

    @property
    def threshold(self) -> float:
        """Equivalent threshold on the Exp(1) likelihood of the deviation."""
        return self.p_fa


@dataclass(frozen=True)
class AuthTrial:
    challenge: float
    observed: float
    hypothesis: Literal["H0", "H1"]
    decision: Decision


def draw_challenge(challenges, rng: np.random.Generator) -> float:
    """Pick one challenge uniformly from the challenge set."""
    challenges = np.asarray(challenges, dtype=float)
    if challenges.size == 0:
        raise ValueError("challenge set is empty")
    return float(challenges[rng.integers(challenges.size)])


def sample_legit_response(challenge, rng: np.random.Generator, size=None):
    """Legitimate response: challenge plus Exp(1) fading, in dB.

    One fading draw per challenge when ``challenge`` is an array.
    """
    if size is None:
        size = np.shape(challenge) or None
    return challenge + rng.exponential(1.0, size=size)


def sample_attack_response(range_min: float, range_max: float, rng: np.random.Generator, size=None):
    """Random-guessing attacker: uniform over ``[range_min, range_max]``."""
    if range_max < range_min:
        raise ValueError(f"inverted range [{range_min}, {range_max}]")
    return rng.uniform(range_min, range_max, size=size)


def accepts(observed, challenge, config: VerifierConfig):
    """Vectorized acceptance test: ``0 <= observed - challenge <= -ln p_fa``."""
    dev = np.asarray(observed, dtype=float) - np.asarray(challenge, dtype=float)
    return (dev >= 0.0) & (dev <= config.interval)


def verify(observed: float, challenge: float, config: VerifierConfig) -> Decision:
    return "accept" if bool(accepts(observed, challenge, config)) else "reject"


def analytic_pmd(range_r: float, p_fa: float) -> float:
    """Missed-detection probability against a uniform guesser.

    The guess minus the challenge is triangular on ``[-r, r]``; the miss
    probability is its mass on ``[0, min(-ln p_fa, r)]``.
    """
    if not range_r > 0:
        raise ValueError("range_r must be positive")
    if not 0.0 < p_fa < 1.0:
        raise ValueError("p_fa must lie in (0, 1)")
    width = min(-math.log(p_fa), range_r)
    return 0.5 - (range_r - width) ** 2 / (2.0 * range_r**2)


def simulate_det(range_r: float, p_fa_grid, trials: int, rng: np.random.Generator,
                 range_min: float = 0.0):
    """Monte Carlo FA/MD rates for each target false-alarm probability.

    Challenges and attacker guesses are continuous uniform over
    ``[range_min, range_min + r]``. Returns a list of
    ``(p_fa_target, p_fa_empirical, p_md_empirical)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_fa_grid = [float(p) for p in p_fa_grid]
    if not p_fa_grid or any(not 0.0 < p < 1.0 for p in p_fa_grid):
        raise ValueError("every p_fa must lie in (0, 1)")
    lo, hi = range_min, range_min + range_r
    out = []
    for p_fa in p_fa_grid:
        config = VerifierConfig(p_fa)
        a0 = rng.uniform(lo, hi, trials)
        legit = sample_legit_response(a0, rng)
        a1 = rng.uniform(lo, hi, trials)
        attack = sample_attack_response(lo, hi, rng, trials)
        fa = 1.0 - accepts(legit, a0, config).mean()
        md = accepts(attack, a1, config).mean()
        out.append((p_fa, float(fa), float(md)))
    return out


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n)
