"""
Security: false alarm vs missed detection
=========================================

Bob accepts a response when it exceeds the challenge by at most
``-ln(P_fa)`` dB. A random-guessing attacker is accepted with a probability
that depends only on the attenuation spread ``r``. Compare the closed form
with simulation for r = 5, 10, 20 and 40 dB.
"""
import math

import numpy as np

from crpla import VerifierConfig, analytic_pmd, simulate_det, verify

cfg = VerifierConfig(p_fa=0.05)
print(f"P_fa = {cfg.p_fa} -> acceptance interval {cfg.interval:.3f} dB")
print("deviation 1.0 dB:", verify(71.0, 70.0, cfg), "| deviation 4.0 dB:", verify(74.0, 70.0, cfg))

# %%
rng = np.random.default_rng(0)
p_fa_grid = [0.5, math.exp(-1), 0.1, 0.05, 0.01]
print(f"\n{'r':>4} {'P_fa':>8} {'P_fa sim':>9} {'P_md':>8} {'P_md sim':>9}")
for r in (5, 10, 20, 40):
    for p_fa, fa, md in simulate_det(r, p_fa_grid, 100_000, rng):
        print(f"{r:4d} {p_fa:8.4f} {fa:9.4f} {analytic_pmd(r, p_fa):8.4f} {md:9.4f}")
