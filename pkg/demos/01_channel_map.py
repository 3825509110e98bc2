"""
Attenuation map over the flight region
======================================

Build the 50 m x 50 m map at 1 m spacing: Friis path loss from a transmitter
20 m below the plane center plus correlated shadowing, then quantize it
into 10 levels. Each level is one challenge; the positions sharing it form
its class.
"""
import numpy as np

from crpla import GridSpec, ShadowingParams, attenuation_range, build_channel_map
from crpla.channel import autocorrelation_at, synthesize_shadowing

grid = GridSpec(n1=50, n2=50, step=1.0, height=20.0, carrier_freq=1.8e9)
params = ShadowingParams(sigma_sh=6.0, d_coh=10 * grid.wavelength, seed=0)
chmap = build_channel_map(grid, params, num_levels=10)

print(f"N = {chmap.size} positions, |A| = {len(chmap.challenges)} challenges")
print(f"attenuation spread r = {attenuation_range(chmap):.2f} dB")
for a, cls in zip(chmap.challenges, chmap.classes):
    print(f"  challenge {a:6.2f} dB -> {cls.size:4d} positions")

# %%
# The shadowing alone has the requested spread, and its correlation at one
# coherence distance sits near 1/e.
field = synthesize_shadowing(grid, params)
print(f"shadowing std = {field.std():.6f} dB")
print(f"rho(D_coh) = {autocorrelation_at(field.reshape(grid.shape), grid.step, params.d_coh):.3f}"
      f" (target {np.exp(-1):.3f})")

# %%
# Plot, if matplotlib is available.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    xy = grid.coords()
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, z, title in zip(axes, (chmap.eta, chmap.quantized), ("eta [dB]", "quantized [dB]")):
        im = ax.pcolormesh(np.unique(xy[:, 0]), np.unique(xy[:, 1]), z.reshape(grid.shape), shading="nearest")
        fig.colorbar(im, ax=ax)
        ax.set_title(title)
    fig.savefig("channel_map.png", dpi=110, bbox_inches="tight")
