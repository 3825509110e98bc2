"""Gridded flight region, free-space path loss, correlated shadowing and the
quantized attenuation map that defines the challenge classes.

Positions are indexed row-major: ``index = row * n1 + col``. Grid index
``(n2 // 2, n1 // 2)`` sits at planar coordinate (0, 0), directly above the
transmitter.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class GridSpec:
    n1: int = 50
    n2: int = 50
    step: float = 1.0
    height: float = 20.0
    carrier_freq: float = 1.8e9

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError(f"grid needs at least 2x2 positions, got {self.n1}x{self.n2}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.height >= 0:
            raise ValueError("height must be non-negative")
        if not self.carrier_freq > 0:
            raise ValueError("carrier_freq must be positive")

    @property
    def size(self) -> int:
        """Total number of positions N."""
        return self.n1 * self.n2

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n2, self.n1)

    def check_index(self, index) -> None:
        index = np.asarray(index)
        if np.any(index < 0) or np.any(index >= self.size):
            raise IndexError(f"position index out of range [0, {self.size})")

    def coords(self) -> np.ndarray:
        """Planar (x, y) coordinates in meters of every position, shape (N, 2)."""
        rows, cols = np.divmod(np.arange(self.size), self.n1)
        x = (cols - self.n1 // 2) * self.step
        y = (rows - self.n2 // 2) * self.step
        return np.column_stack([x, y]).astype(float)

    def coord(self, index: int) -> tuple[float, float]:
        self.check_index(index)
        row, col = divmod(int(index), self.n1)
        return ((col - self.n1 // 2) * self.step, (row - self.n2 // 2) * self.step)


@dataclass(frozen=True)
class ShadowingParams:
    sigma_sh: float = 6.0
    d_coh: float = 10 * SPEED_OF_LIGHT / 1.8e9
    seed: int = 0

    def __post_init__(self):
        if not self.sigma_sh > 0:
            raise ValueError("sigma_sh must be positive")
        if not self.d_coh > 0:
            raise ValueError("d_coh must be positive")


def fspl_db(distance, carrier_freq: float):
    """Free-space path loss in dB, path-loss exponent 2, distance in meters."""
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise ValueError("distance must be positive")
    return 20.0 * np.log10(4.0 * np.pi * distance * carrier_freq / SPEED_OF_LIGHT)


def path_loss_field(grid: GridSpec) -> np.ndarray:
    """Friis attenuation at every position, shape (N,)."""
    xy = grid.coords()
    d = np.sqrt(xy[:, 0] ** 2 + xy[:, 1] ** 2 + grid.height**2)
    return fspl_db(d, grid.carrier_freq)


def friis_path_loss(grid: GridSpec, position_index: int) -> float:
    grid.check_index(position_index)
    x, y = grid.coord(position_index)
    d = np.sqrt(x * x + y * y + grid.height**2)
    return float(fspl_db(d, grid.carrier_freq))


def gudmundson_corr(delta, params: ShadowingParams):
    """Shadowing autocorrelation ``sigma^2 exp(-delta / d_coh)`` in dB^2."""
    delta = np.asarray(delta, dtype=float)
    if np.any(delta < 0):
        raise ValueError("delta must be non-negative")
    out = params.sigma_sh**2 * np.exp(-delta / params.d_coh)
    return float(out) if out.ndim == 0 else out


def shadowing_filter(grid: GridSpec, params: ShadowingParams) -> np.ndarray:
    """Frequency response of the unit-energy shaping filter, shape (n2, n1).

    The correlation is sampled on the centered distance grid, moved to DFT
    origin and transformed; negative spectral samples are clamped to zero.
    """
    rows = np.arange(grid.n2) - grid.n2 // 2
    cols = np.arange(grid.n1) - grid.n1 // 2
    delta = grid.step * np.hypot(rows[:, None], cols[None, :])
    r = gudmundson_corr(delta, params)
    psd = np.fft.fft2(np.fft.ifftshift(r)).real
    psd = np.clip(psd, 0.0, None)
    # Parseval: sum |h|^2 = sum |H|^2 / N
    k = np.sqrt(grid.size / psd.sum())
    return k * np.sqrt(psd)


def synthesize_shadowing(grid: GridSpec, params: ShadowingParams) -> np.ndarray:
    """Draw a correlated shadowing field in dB, shape (N,).

    Complex Gaussian noise is circularly convolved with the shaping filter;
    the real part is rescaled so its sample std (ddof=0) equals ``sigma_sh``.
    """
    rng = np.random.default_rng(params.seed)
    h = shadowing_filter(grid, params)
    scale = params.sigma_sh / np.sqrt(2.0)
    w = scale * (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    field = np.fft.ifft2(h * np.fft.fft2(w)).real
    field *= params.sigma_sh / field.std()
    return field.ravel()


def empirical_autocorrelation(field: np.ndarray, max_lag: int) -> np.ndarray:
    """Normalized autocorrelation at integer lags 0..max_lag.

    Estimated along both grid axes (non-circular) and averaged.
    """
    f = np.asarray(field, dtype=float)
    f = f - f.mean()
    var = np.mean(f * f)
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        horiz = np.mean(f[:, :-k] * f[:, k:])
        vert = np.mean(f[:-k, :] * f[k:, :])
        out[k] = 0.5 * (horiz + vert) / var
    return out


def autocorrelation_at(field: np.ndarray, step: float, distance: float) -> float:
    """Normalized autocorrelation at ``distance`` meters (linear interpolation)."""
    lag = distance / step
    rho = empirical_autocorrelation(field, int(np.ceil(lag)) + 1)
    return float(np.interp(lag, np.arange(rho.size), rho))


@dataclass(frozen=True, eq=False)
class ChannelMap:
    grid: GridSpec
    eta: np.ndarray
    quantized: np.ndarray
    levels: np.ndarray
    challenges: np.ndarray
    labels: np.ndarray
    classes: tuple
    num_levels: int
    params: ShadowingParams | None = None
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.grid.size

    def challenge_index(self, challenge: float) -> int:
        """Index of ``challenge`` in the challenge set; raises KeyError if absent."""
        hit = np.flatnonzero(np.isclose(self.challenges, challenge, rtol=0.0, atol=1e-9))
        if hit.size == 0:
            raise KeyError(f"{challenge!r} is not a challenge of this map")
        return int(hit[0])

    def class_of(self, challenge: float) -> np.ndarray:
        return self.classes[self.challenge_index(challenge)]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def quantize(eta: np.ndarray, num_levels: int) -> tuple[np.ndarray, np.ndarray]:
    """Midrise uniform quantizer over [min eta, max eta].

    Returns ``(levels, codes)`` where ``levels[codes]`` is the quantized map.
    Values on a decision boundary go to the upper level.
    """
    if num_levels < 2:
        raise ValueError("num_levels must be at least 2")
    eta = np.asarray(eta, dtype=float)
    lo, hi = float(eta.min()), float(eta.max())
    if hi == lo:
        return np.array([lo]), np.zeros(eta.shape, dtype=np.int64)
    width = (hi - lo) / num_levels
    levels = lo + (np.arange(num_levels) + 0.5) * width
    codes = np.floor((eta - lo) / width).astype(np.int64)
    np.clip(codes, 0, num_levels - 1, out=codes)
    return levels, codes


def quantize_map(grid: GridSpec, eta, num_levels: int,
                 params: ShadowingParams | None = None) -> ChannelMap:
    """Quantize an attenuation field and build the challenge classes."""
    eta = np.asarray(eta, dtype=float).ravel()
    if eta.size != grid.size:
        raise ValueError(f"eta has {eta.size} values, grid has {grid.size} positions")
    levels, codes = quantize(eta, num_levels)
    hit = np.unique(codes)
    labels = np.searchsorted(hit, codes)
    classes = tuple(_frozen(np.flatnonzero(labels == k)) for k in range(hit.size))
    return ChannelMap(
        grid=grid,
        eta=_frozen(eta),
        quantized=_frozen(levels[codes]),
        levels=_frozen(levels),
        challenges=_frozen(levels[hit]),
        labels=_frozen(labels),
        classes=classes,
        num_levels=num_levels,
        params=params,
    )


def build_channel_map(grid: GridSpec, params: ShadowingParams, num_levels: int = 10) -> ChannelMap:
    if num_levels < 2:
        raise ValueError("num_levels must be at least 2")
    eta = path_loss_field(grid) + synthesize_shadowing(grid, params)
    return quantize_map(grid, eta, num_levels, params)


def attenuation_range(chmap: ChannelMap) -> float:
    """Spread r between the largest and smallest quantized attenuation."""
    return float(chmap.quantized.max() - chmap.quantized.min())


def save_map(path, chmap: ChannelMap) -> Path:
    """Write the map to an ``.npz`` archive; :func:`load_map` restores it exactly."""
    path = Path(path)
    meta = {
        "grid": asdict(chmap.grid),
        "params": asdict(chmap.params) if chmap.params is not None else None,
        "num_levels": chmap.num_levels,
    }
    with open(path, "wb") as fh:
        np.savez(fh, eta=np.asarray(chmap.eta), levels=np.asarray(chmap.levels),
                 meta=np.array(json.dumps(meta, sort_keys=True)))
    return path


def load_map(path) -> ChannelMap:
    with np.load(Path(path), allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        eta = data["eta"]
        levels = data["levels"]
    grid = GridSpec(**meta["grid"])
    params = ShadowingParams(**meta["params"]) if meta["params"] is not None else None
    chmap = quantize_map(grid, eta, meta["num_levels"], params)
    if not np.array_equal(chmap.levels, levels):
        raise ValueError(f"{path}: stored quantizer levels do not match the stored field")
    return chmap


def map_rows(chmap: ChannelMap):
    """Yield ``(x_m, y_m, eta_db, quantized_db)`` per position."""
    xy = chmap.grid.coords()
    for (x, y), e, q in zip(xy, chmap.eta, chmap.quantized):
        yield float(x), float(y), float(e), float(q)
