"""
Long-run energy of the three policies
=====================================

All policies start from the same random positions and see the same
challenge sequences. Greedy wins the first move; the look-ahead policies
settle in regions rich in distinct attenuations and spend less afterwards.
Also writes the figure CSVs (and PNGs if matplotlib is installed) to
``./energy_demo``.
"""
from crpla import harness

config = harness.config_from_dict({"num_starts": 200, "episode_length": 100})
chmap = harness.make_map(config)
policies = harness.build_policies(config, chmap)
comp = harness.compare_policies(config, chmap, policies=policies)

for kind in ("pg", "std", "bi"):
    m = comp.mean(kind)
    print(f"{kind:>3}: first move {m[0]:6.1f} J, mean over t = 20..100 {m[19:].mean():6.1f} J")

# %%
try:
    import matplotlib  # noqa: F401
    plot = True
except ImportError:
    plot = False
for kind in ("energy", "trajectory"):
    for path in harness.emit_figure_data(kind, "energy_demo", config, chmap=chmap, policies=policies,
                                         comparison=comp, plot=plot):
        print("wrote", path)
