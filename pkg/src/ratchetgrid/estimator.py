"""Online noise-intensity estimation from sampled buffer energies.

The router watches its own energy state x at a fixed sampling interval dt
and estimates the local diffusion coefficient from the realized quadratic
variation over a sliding window of W increments:

    D_hat = (1 / (2*dt)) * mean_k (x_k - x_{k-1})**2

Increments contain the deterministic drift as well, so D_hat carries an
O(drift**2 * dt) positive bias; at the default dt = 1e-3 this is
negligible. No mean subtraction is applied. Before the window fills the
mean runs over whatever increments exist, so start-up never reports a
spurious zero.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

__all__ = [
    "EstimatorConfig",
    "EstimatorState",
    "InsufficientSamplesError",
    "push_sample",
    "current_estimate",
]


class InsufficientSamplesError(ValueError):
    """Raised when an estimate is requested before two samples exist."""


@dataclass(frozen=True)
class EstimatorConfig:
    """Sliding-window size W (in increments) and sampling interval dt."""

    window_len: int = 100
    dt: float = 1e-3

    def __post_init__(self):
        if self.window_len < 1:
            raise ValueError(f"window_len must be >= 1, got {self.window_len}")
        if not (self.dt > 0.0):
            raise ValueError(f"dt must be > 0, got {self.dt}")


class EstimatorState:
    """Ring of the last W+1 samples plus the current estimate.

    The squared increments are held alongside a running sum so each push is
    O(1) regardless of window length.
    """

    def __init__(self, config: EstimatorConfig):
        self.config = config
        self._samples: deque[float] = deque(maxlen=config.window_len + 1)
        self._sq_increments: deque[float] = deque(maxlen=config.window_len)
        self._sq_sum = 0.0
        self.d_hat = 0.0

    @property
    def n_samples(self) -> int:
        return len(self._samples)

    @property
    def n_increments(self) -> int:
        return len(self._sq_increments)


def push_sample(state: EstimatorState, x: float) -> EstimatorState:
    """Append one observation and refresh the estimate.

    Windows shorter than W average over all available increments.
    Non-finite inputs are rejected.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"sample must be finite, got {x}")
    if state._samples:
        inc = x - state._samples[-1]
        sq = inc * inc
        if len(state._sq_increments) == state._sq_increments.maxlen:
            state._sq_sum -= state._sq_increments[0]
        state._sq_increments.append(sq)
        state._sq_sum += sq
        mean_sq = state._sq_sum / len(state._sq_increments)
        state.d_hat = max(mean_sq / (2.0 * state.config.dt), 0.0)
    state._samples.append(x)
    return state


def current_estimate(state: EstimatorState) -> float:
    """Return D_hat without mutating the state."""
    if state.n_samples < 2:
        raise InsufficientSamplesError(
            "insufficient samples: need at least 2 to form one increment"
        )
    return state.d_hat
