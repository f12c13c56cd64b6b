"""Euler-Maruyama integration of a single router under closed-loop control.

The buffer energy x follows

    dx/dt = u*P(t) - P_load - Phi(u, D_hat) + sqrt(2*D(t)) * xi(t)

where the switch duty ratio u gates the mean supply intake, the load drain
P_load is constant, and the information processing cost Phi(u, D_hat) --
the energy actually consumed to run the control at the current noise
estimate -- is subtracted from the stored energy. Supply fluctuations
enter additively (the buffer is never isolated from line noise; this also
keeps the estimator observing the environment while the router is
suppressed, without which sustained abandonment could not occur).
x is clamped to [0, x_max]: storage is finite.

The closed loop runs three phases on a fixed cadence: estimate D_hat from
the sampled buffer trace, maximize J to get u*, then integrate with u*
applied. State samples feed the estimator every EstimatorConfig.dt (an
integer multiple of the integration step), and u* is refreshed every
``control_interval`` steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimator import EstimatorConfig, EstimatorState, push_sample
from .objective import (
    DEFAULT_PARAMS,
    RouterParams,
    entropy_penalty,
    evaluate_J,
    info_cost,
    optimize_u,
)
from .schedules import NoiseSchedule

__all__ = [
    "RouterState",
    "TrajectoryRecord",
    "drift",
    "em_step",
    "run_single",
]


@dataclass
class RouterState:
    """Mutable per-router integration state."""

    x: float
    u: float = 1.0
    d_hat: float = 0.0
    estimator: EstimatorState = field(
        default_factory=lambda: EstimatorState(EstimatorConfig())
    )


@dataclass(frozen=True)
class TrajectoryRecord:
    """One control-decision snapshot.

    phi_loss and entropy_loss are the two loss channels of the running
    decomposition (information dissipation and residual-entropy quality
    loss) evaluated at the applied control and current estimate;
    coupling_flux is the net diffusive energy inflow (zero for a solo
    router).
    """

    t: float
    x: float
    u_star: float
    d_true: float
    d_hat: float
    phi_loss: float
    entropy_loss: float
    j_value: float
    coupling_flux: float = 0.0


def drift(
    x: float,
    u: float,
    p_mean: float,
    d_hat: float,
    params: RouterParams,
    p_load: float,
) -> float:
    """Deterministic power balance u*P - P_load - Phi(u, D_hat)."""
    return u * p_mean - p_load - info_cost(u, d_hat, params.kappa, params.beta)


def em_step(
    state: RouterState,
    t: float,
    dt: float,
    schedule: NoiseSchedule,
    params: RouterParams,
    rng: np.random.Generator,
    *,
    p_load: float = 0.3,
    x_max: float = 10.0,
    extra_drift: float = 0.0,
    push: bool = True,
) -> RouterState:
    """Advance the buffer by one Euler-Maruyama step.

    Exactly one standard normal is drawn per call, so RNG streams stay
    aligned across schedules and coupling configurations. ``extra_drift``
    carries the network coupling term (zero for a solo router); ``push``
    controls whether the new sample feeds the estimator (the caller owns
    the sampling cadence).
    """
    if not (dt > 0.0):
        raise ValueError(f"dt must be > 0, got {dt}")
    d_true = schedule.d_of_t(t)
    z = rng.standard_normal()
    dx = (
        drift(state.x, state.u, schedule.p_mean(t), state.d_hat, params, p_load)
        + extra_drift
    ) * dt + math.sqrt(2.0 * d_true * dt) * z
    x_new = state.x + dx
    if x_new < 0.0:
        x_new = 0.0
    elif x_new > x_max:
        x_new = x_max
    state.x = x_new
    if push:
        push_sample(state.estimator, x_new)
    return state


def _estimator_stride(est_cfg: EstimatorConfig, dt: float) -> int:
    """Sampling interval in integration steps; must be a whole multiple."""
    stride = round(est_cfg.dt / dt)
    if stride < 1 or abs(stride * dt - est_cfg.dt) > 1e-9 * est_cfg.dt:
        raise ValueError(
            f"estimator dt {est_cfg.dt} must be a positive integer multiple "
            f"of the integration step {dt}"
        )
    return stride


def _decide(
    state: RouterState,
    params: RouterParams,
    opt_tol: float,
    opt_grid: int,
) -> float:
    """Refresh d_hat and u* if at least one increment exists; return J."""
    if state.estimator.n_increments >= 1:
        state.d_hat = state.estimator.d_hat
        result = optimize_u(state.d_hat, params, tol=opt_tol, grid_points=opt_grid)
        state.u = result.u_star
        return result.j_star
    return evaluate_J(state.u, state.d_hat, params)


def _record(
    state: RouterState,
    t: float,
    d_true: float,
    j_value: float,
    params: RouterParams,
    coupling_flux: float = 0.0,
) -> TrajectoryRecord:
    return TrajectoryRecord(
        t=t,
        x=state.x,
        u_star=state.u,
        d_true=d_true,
        d_hat=state.d_hat,
        phi_loss=info_cost(state.u, state.d_hat, params.kappa, params.beta),
        entropy_loss=entropy_penalty(state.u, state.d_hat, params),
        j_value=j_value,
        coupling_flux=coupling_flux,
    )


def run_single(
    params: RouterParams = DEFAULT_PARAMS,
    est_cfg: EstimatorConfig = EstimatorConfig(),
    schedule: NoiseSchedule = None,
    t_end: float = 10.0,
    dt: float = 1e-3,
    control_interval: int = 100,
    seed=0,
    *,
    p_load: float = 0.3,
    x_max: float = 10.0,
    x0: float = 1.0,
    u0: float = 1.0,
    opt_tol: float = 1e-6,
    opt_grid: int = 1024,
) -> list[TrajectoryRecord]:
    """Closed-loop run; one record per control decision.

    Bit-reproducible for a fixed (configuration, seed): ``seed`` may be an
    int or a numpy SeedSequence. The very first decision happens before
    any increment exists and keeps the initial control u0 (probe-on by
    default); from the second decision on, d_hat is real.
    """
    if schedule is None:
        raise ValueError("schedule is required")
    if not (t_end > 0.0):
        raise ValueError(f"t_end must be > 0, got {t_end}")
    if not (dt > 0.0):
        raise ValueError(f"dt must be > 0, got {dt}")
    if control_interval < 1:
        raise ValueError(f"control_interval must be >= 1, got {control_interval}")
    if not (0.0 <= u0 <= 1.0):
        raise ValueError(f"u0 must lie in [0, 1], got {u0}")
    stride = _estimator_stride(est_cfg, dt)

    rng = np.random.default_rng(seed)
    state = RouterState(x=float(x0), u=float(u0), estimator=EstimatorState(est_cfg))
    push_sample(state.estimator, state.x)

    records: list[TrajectoryRecord] = []
    n_steps = round(t_end / dt)
    for k in range(n_steps):
        t = k * dt
        if k % control_interval == 0:
            j_value = _decide(state, params, opt_tol, opt_grid)
            records.append(_record(state, t, schedule.d_of_t(t), j_value, params))
        em_step(
            state,
            t,
            dt,
            schedule,
            params,
            rng,
            p_load=p_load,
            x_max=x_max,
            push=((k + 1) % stride == 0),
        )
    return records
