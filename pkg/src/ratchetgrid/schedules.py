"""Supply schedules: mean power P(t) and environmental noise intensity D(t).

Three kinds: constant, piecewise-constant, and a seeded pseudo-solar day
where a clipped Ornstein-Uhlenbeck cloud envelope modulates the noise on
top of a clear-sky sine supply.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "NoiseSchedule",
    "SolarConfig",
    "constant_schedule",
    "piecewise_schedule",
    "pseudo_solar",
]


@dataclass(frozen=True)
class NoiseSchedule:
    """Time-dependent supply description.

    p_mean(t) and d_of_t(t) must return >= 0 for every queried t; the
    constructors below guarantee that. seed records the RNG seed of any
    stochastic component (None for deterministic kinds).
    """

    kind: str
    p_mean: Callable[[float], float]
    d_of_t: Callable[[float], float]
    seed: Optional[int] = None


def constant_schedule(p_mean: float = 1.0, d: float = 1.0) -> NoiseSchedule:
    """Fixed supply and noise intensity."""
    if p_mean < 0.0 or d < 0.0:
        raise ValueError("p_mean and d must be >= 0")
    p, dd = float(p_mean), float(d)
    return NoiseSchedule("constant", lambda t: p, lambda t: dd)


def piecewise_schedule(times, p_values, d_values) -> NoiseSchedule:
    """Step functions over breakpoints.

    ``times`` must be strictly increasing and start at 0; value i applies
    on [times[i], times[i+1]), the last value from times[-1] onward.
    """
    times = [float(t) for t in times]
    p_values = [float(p) for p in p_values]
    d_values = [float(d) for d in d_values]
    if not times or times[0] != 0.0:
        raise ValueError("times must start at 0.0")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    if len(p_values) != len(times) or len(d_values) != len(times):
        raise ValueError("p_values and d_values must match times in length")
    if any(p < 0.0 for p in p_values) or any(d < 0.0 for d in d_values):
        raise ValueError("schedule values must be >= 0")

    def p_mean(t: float) -> float:
        return p_values[bisect.bisect_right(times, t) - 1]

    def d_of_t(t: float) -> float:
        return d_values[bisect.bisect_right(times, t) - 1]

    return NoiseSchedule("piecewise", p_mean, d_of_t)


@dataclass(frozen=True)
class SolarConfig:
    """Pseudo-solar day: clear-sky sine supply plus cloud-driven noise.

    Supply is max(0, p0*sin(2*pi*t/t_day)), zero at t = 0 and peaking at
    t_day/4. Noise is d_base + d_cloud*c(t) with c(t) in [0, 1] a clipped
    Ornstein-Uhlenbeck envelope (relaxation time relax_frac*t_day,
    stationary std cloud_std about zero), sampled once on a grid of
    spacing grid_dt and repeated with period t_day.
    """

    p0: float = 1.0
    t_day: float = 24.0
    d_base: float = 0.2
    d_cloud: float = 3.0
    grid_dt: float = 1e-3
    relax_frac: float = 0.05
    cloud_std: float = 0.5

    def __post_init__(self):
        if not (self.t_day > 0.0):
            raise ValueError(f"t_day must be > 0, got {self.t_day}")
        if self.p0 < 0.0 or self.d_base < 0.0 or self.d_cloud < 0.0:
            raise ValueError("amplitudes must be >= 0")
        if not (self.grid_dt > 0.0) or not (self.relax_frac > 0.0):
            raise ValueError("grid_dt and relax_frac must be > 0")
        if self.cloud_std < 0.0:
            raise ValueError("cloud_std must be >= 0")


def pseudo_solar(config: SolarConfig = SolarConfig(), seed: int = 0) -> NoiseSchedule:
    """Build a seeded pseudo-solar schedule; identical seed, identical D(t)."""
    rng = np.random.default_rng(seed)
    n = max(int(round(config.t_day / config.grid_dt)), 1)
    tau = config.relax_frac * config.t_day
    decay = math.exp(-config.grid_dt / tau)
    kick = config.cloud_std * math.sqrt(1.0 - decay * decay)
    z = rng.standard_normal(n)
    latent = np.empty(n)
    c = 0.0
    for k in range(n):  # exact OU recursion about zero mean
        c = decay * c + kick * z[k]
        latent[k] = c
    envelope = np.clip(latent, 0.0, 1.0)

    p0, t_day, d_base, d_cloud = config.p0, config.t_day, config.d_base, config.d_cloud
    grid_dt = config.grid_dt
    two_pi = 2.0 * math.pi

    def p_mean(t: float) -> float:
        return max(0.0, p0 * math.sin(two_pi * t / t_day))

    def d_of_t(t: float) -> float:
        idx = int((t % t_day) / grid_dt)
        if idx >= n:
            idx = n - 1
        return d_base + d_cloud * envelope[idx]

    return NoiseSchedule("pseudo_solar", p_mean, d_of_t, seed=seed)
