"""Noise sweep of the optimal control law and critical-point location.

u*(D) is a memoryless argmax, so upward and downward sweeps coincide by
construction; no hysteresis is modelled even though the transition is
first order. The critical point is defined operationally as the
abandonment boundary of optimize_u -- the D at which the interior optimum
stops beating J(0) -- which covers both the "maximum disappears" and the
"maximum loses to the origin" readings without distinguishing them.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .objective import RouterParams, optimize_u

__all__ = [
    "SweepSpec",
    "SweepPoint",
    "CriticalPoint",
    "NotBracketedError",
    "sweep",
    "detect_jumps",
    "find_critical",
]


class NotBracketedError(ValueError):
    """Raised when [d_lo, d_hi] does not bracket the abandonment boundary."""


@dataclass(frozen=True)
class SweepSpec:
    """Noise grid for the bifurcation diagram.

    jump_threshold is the minimum |delta u*| between adjacent grid points
    flagged as a discontinuity.
    """

    d_min: float = 0.0
    d_max: float = 4.0
    n_points: int = 401
    params: RouterParams = RouterParams()
    jump_threshold: float = 0.005

    def __post_init__(self):
        if not (0.0 <= self.d_min < self.d_max):
            raise ValueError(
                f"need 0 <= d_min < d_max, got [{self.d_min}, {self.d_max}]"
            )
        if self.n_points < 2:
            raise ValueError(f"n_points must be >= 2, got {self.n_points}")
        if not (self.jump_threshold > 0.0):
            raise ValueError(
                f"jump_threshold must be > 0, got {self.jump_threshold}"
            )


@dataclass(frozen=True)
class SweepPoint:
    d: float
    u_star: float
    j_star: float
    abandoned: bool


@dataclass(frozen=True)
class CriticalPoint:
    """Located abandonment boundary.

    order is "first_order" when the control jumps by at least the
    detection threshold, "none" when it decays continuously into zero.
    """

    d_c: float
    u_before: float
    u_after: float
    order: str


def _eval_point(args) -> SweepPoint:
    d, params = args
    r = optimize_u(d, params)
    return SweepPoint(d, r.u_star, r.j_star, r.abandoned)


def sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepPoint]:
    """Evaluate optimize_u over the D grid in ascending order.

    Pure and deterministic; with jobs > 1 the grid points fan out to a
    process pool, output order unchanged.
    """
    dvals = np.linspace(spec.d_min, spec.d_max, spec.n_points)
    tasks = [(float(d), spec.params) for d in dvals]
    if jobs <= 1:
        return [_eval_point(t) for t in tasks]
    workers = min(jobs, os.cpu_count() or 1, spec.n_points)
    chunk = max(1, spec.n_points // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_eval_point, tasks, chunksize=chunk))


def detect_jumps(points: list[SweepPoint], jump_threshold: float = 0.005) -> list[int]:
    """Indices i where u*[i] - u*[i+1] >= jump_threshold."""
    return [
        i
        for i in range(len(points) - 1)
        if points[i].u_star - points[i + 1].u_star >= jump_threshold
    ]


def find_critical(
    params: RouterParams,
    d_lo: float,
    d_hi: float,
    tol: float = 1e-4,
    jump_threshold: float = 0.005,
) -> CriticalPoint:
    """Bisect the abandonment indicator to width tol.

    Requires control active at d_lo and abandoned at d_hi; otherwise the
    boundary is not bracketed (e.g. kappa = 0 never abandons) and
    NotBracketedError is raised.
    """
    if not (0.0 <= d_lo < d_hi):
        raise ValueError(f"need 0 <= d_lo < d_hi, got [{d_lo}, {d_hi}]")
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol}")
    if optimize_u(d_lo, params).abandoned:
        raise NotBracketedError(f"already abandoned at d_lo = {d_lo}")
    if not optimize_u(d_hi, params).abandoned:
        raise NotBracketedError(f"control still active at d_hi = {d_hi}")

    lo, hi = d_lo, d_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if optimize_u(mid, params).abandoned:
            hi = mid
        else:
            lo = mid
    u_before = optimize_u(lo, params).u_star
    order = "first_order" if u_before >= jump_threshold else "none"
    return CriticalPoint(d_c=0.5 * (lo + hi), u_before=u_before, u_after=0.0, order=order)
