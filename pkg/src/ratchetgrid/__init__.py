"""Power packet routers as information ratchets.

A numpy-based library for simulating energy-buffering packet routers whose
control effort is continuously re-optimized against the thermodynamic cost
of the information it consumes, for locating the noise intensity at which
control is abandoned outright (a first-order transition), and for studying
how diffusive coupling between routers pushes that boundary outward.
"""

from .version import __version__

from .objective import (
    DEFAULT_PARAMS,
    OptimizationResult,
    RouterParams,
    entropy_penalty,
    evaluate_J,
    gain,
    info_cost,
    optimize_u,
)
from .estimator import (
    EstimatorConfig,
    EstimatorState,
    InsufficientSamplesError,
    current_estimate,
    push_sample,
)
from .schedules import (
    NoiseSchedule,
    SolarConfig,
    constant_schedule,
    piecewise_schedule,
    pseudo_solar,
)
from .sde import RouterState, TrajectoryRecord, drift, em_step, run_single
from .bifurcation import (
    CriticalPoint,
    NotBracketedError,
    SweepPoint,
    SweepSpec,
    detect_jumps,
    find_critical,
    sweep,
)
from .network import (
    BurstScenario,
    NetworkSpec,
    NetworkState,
    burst_tail_control,
    complete_edges,
    coupling_term,
    line_edges,
    load_edge_list,
    network_critical,
    network_step,
    ring_edges,
    run_network,
    star_edges,
)
from .config import (
    ConfigError,
    ExperimentConfig,
    RunManifest,
    config_from_dict,
    config_hash,
    load_config,
)
from .runner import run_experiment

__all__ = [
    "__version__",
    "DEFAULT_PARAMS",
    "RouterParams",
    "OptimizationResult",
    "gain",
    "info_cost",
    "entropy_penalty",
    "evaluate_J",
    "optimize_u",
    "EstimatorConfig",
    "EstimatorState",
    "InsufficientSamplesError",
    "push_sample",
    "current_estimate",
    "NoiseSchedule",
    "SolarConfig",
    "constant_schedule",
    "piecewise_schedule",
    "pseudo_solar",
    "RouterState",
    "TrajectoryRecord",
    "drift",
    "em_step",
    "run_single",
    "SweepSpec",
    "SweepPoint",
    "CriticalPoint",
    "NotBracketedError",
    "sweep",
    "detect_jumps",
    "find_critical",
    "NetworkSpec",
    "NetworkState",
    "BurstScenario",
    "line_edges",
    "ring_edges",
    "star_edges",
    "complete_edges",
    "load_edge_list",
    "coupling_term",
    "network_step",
    "run_network",
    "burst_tail_control",
    "network_critical",
    "ConfigError",
    "ExperimentConfig",
    "RunManifest",
    "load_config",
    "config_from_dict",
    "config_hash",
    "run_experiment",
]
