"""
Choosing where to fly
=====================

Given the current position and a drawn challenge, each policy picks a
position of that challenge's class:

* greedy: the closest one,
* STD-based: closest, but favouring positions whose neighbourhood holds many
  different attenuations (bonus decaying with time),
* value iteration: optimal for the discounted long-run energy.
"""
import numpy as np

from crpla import EnergyModel, GridSpec, ShadowingParams, build_channel_map, energy
from crpla import greedy_next, solve_value_iteration, std_next, strategic_field

grid = GridSpec()
chmap = build_channel_map(grid, ShadowingParams(d_coh=10 * grid.wavelength, seed=0), 10)
model = EnergyModel(alpha1=308.71, alpha0=0.85, velocity=5.0)

print(f"5 m hop costs {energy(0, 5, model, grid):.2f} J")

# %%
bi = solve_value_iteration(chmap, model, gamma=0.95)
print(f"value iteration: {bi.iterations_used} sweeps, last change {bi.deltas[-1]:.2e}")
field = strategic_field(chmap, window_l=5, delta=100.0, beta=20.0)

start, k = 1275, 4
a = chmap.challenges[k]
for name, nxt in [("greedy", greedy_next(start, a, chmap, model)),
                  ("STD t=0", std_next(start, a, 0, field, chmap, model)),
                  ("STD t=200", std_next(start, a, 200, field, chmap, model)),
                  ("BI", bi(start, k))]:
    print(f"{name:>10}: {grid.coord(start)} -> {grid.coord(nxt)}  ({energy(start, nxt, model, grid):7.2f} J)")
