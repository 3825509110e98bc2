"""Static figures rendered from the CSV outputs (needs matplotlib)."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def _read(path):
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")
    return np.atleast_1d(data)


def plot_csv(kind: str, csv_path) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    csv_path = Path(csv_path)
    d = _read(csv_path)
    fig, ax = plt.subplots(figsize=(6, 5))
    if kind == "map":
        xs, ys = np.unique(d["x_m"]), np.unique(d["y_m"])
        z = d["eta_db"].reshape(ys.size, xs.size)
        im = ax.pcolormesh(xs, ys, z, shading="nearest")
        fig.colorbar(im, ax=ax, label="attenuation [dB]")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
    elif kind == "det":
        for r in np.unique(d["r_db"]):
            s = d[d["r_db"] == r]
            ax.loglog(s["p_fa_emp"], s["p_md_emp"], "-", label=f"r = {r:g} dB")
            ax.loglog(s["p_fa_target"], s["p_md_analytic"], "o--", mfc="none", color=ax.lines[-1].get_color())
        ax.set_xlabel("P_fa")
        ax.set_ylabel("P_md")
        ax.legend()
    elif kind == "trajectory":
        for name in dict.fromkeys(d["policy"]):
            s = d[d["policy"] == name]
            ax.plot(np.r_[s["from_x"][:1], s["to_x"]], np.r_[s["from_y"][:1], s["to_y"]], ".-", label=name)
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.legend()
    elif kind == "energy":
        for name in dict.fromkeys(d["policy"]):
            s = d[d["policy"] == name]
            ax.plot(s["t"], s["mean_energy_j"], label=name)
            ax.fill_between(s["t"], s["mean_energy_j"] - s["std_energy_j"],
                            s["mean_energy_j"] + s["std_energy_j"], alpha=0.2)
        ax.set_xlabel("t")
        ax.set_ylabel("E[energy] [J]")
        ax.legend()
    else:
        raise ValueError(f"unknown figure kind {kind!r}")
    out = csv_path.with_suffix(".png")
    fig.savefig(out, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return out
