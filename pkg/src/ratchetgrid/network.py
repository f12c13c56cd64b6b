"""Diffusively coupled router networks.

Each node runs its own estimate / optimize / apply loop as in
:mod:`ratchetgrid.sde`; node buffers additionally exchange energy with
their neighbours at rate g per unit level difference:

    dx_i/dt = u_i*P_i(t) - P_load - Phi(u_i, D_hat_i)
              + g * sum_{j in N_i} (x_j - x_i) + sqrt(2*D_i(t)) * xi_i(t)

Updates are synchronous (Jacobi style): every coupling term is evaluated
on the pre-step state, which keeps the pairwise antisymmetry exact and
makes total-energy conservation a clean testable invariant. Per-node RNG
streams derive from (seed, node index), so switching coupling on or off
never perturbs the noise draws: a g = 0 network run is bitwise equal to
independent single-router runs on the same streams.

Collective critical point: coupling drains local fluctuations into the
neighbourhood, so a node's buffer becomes mean-reverting at rate about
g * degree. A sliding-window variance estimator sampling at interval dt_s
then sees the local noise diluted by (1 - exp(-g*deg*dt_s))/(g*deg*dt_s),
and the burst intensity needed to push the node's estimate over the
abandonment boundary grows with g. The reference burst scenario measures
that shift on a five-node ring with a deliberately coarse estimator
sampling interval and wide, clamp-free buffers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .estimator import EstimatorConfig, EstimatorState, push_sample
from .objective import RouterParams
from .bifurcation import NotBracketedError
from .schedules import NoiseSchedule, constant_schedule, piecewise_schedule
from .sde import RouterState, TrajectoryRecord, em_step, _decide, _record, _estimator_stride

__all__ = [
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
    "network_critical",
]


def line_edges(n: int) -> tuple:
    return tuple((i, i + 1) for i in range(n - 1))


def ring_edges(n: int) -> tuple:
    if n < 3:
        return line_edges(n)
    return tuple((i, (i + 1) % n) for i in range(n))


def star_edges(n: int) -> tuple:
    return tuple((0, i) for i in range(1, n))


def complete_edges(n: int) -> tuple:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


def load_edge_list(path) -> tuple:
    """Read an undirected edge list: one ``i j`` pair per line, 0-indexed,
    whitespace separated; ``#`` starts a comment."""
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'i j', got {raw!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: endpoints must be integers, got {raw!r}"
                ) from None
            edges.append((i, j))
    return tuple(edges)


@dataclass
class NetworkSpec:
    """Topology, coupling strength, and per-node configuration.

    node_params may be a single RouterParams shared by every node or one
    per node; schedules is one NoiseSchedule per node (may be left None
    when a scenario supplies them, e.g. in network_critical).
    """

    n_nodes: int
    edges: tuple
    g: float
    node_params: Union[RouterParams, Sequence[RouterParams]] = RouterParams()
    schedules: Optional[Sequence[NoiseSchedule]] = None

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if not (self.g >= 0.0):
            raise ValueError(f"coupling g must be >= 0, got {self.g}")
        seen = set()
        adjacency = [[] for _ in range(self.n_nodes)]
        for e in self.edges:
            i, j = e
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError(f"edge {e} outside [0, {self.n_nodes})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(key)
            adjacency[i].append(j)
            adjacency[j].append(i)
        self._adjacency = tuple(tuple(a) for a in adjacency)
        if not isinstance(self.node_params, RouterParams):
            self.node_params = tuple(self.node_params)
            if len(self.node_params) != self.n_nodes:
                raise ValueError(
                    f"need {self.n_nodes} node_params, got {len(self.node_params)}"
                )
        if self.schedules is not None:
            self.schedules = tuple(self.schedules)
            if len(self.schedules) != self.n_nodes:
                raise ValueError(
                    f"need {self.n_nodes} schedules, got {len(self.schedules)}"
                )

    @property
    def adjacency(self) -> tuple:
        return self._adjacency

    def params_for(self, i: int) -> RouterParams:
        if isinstance(self.node_params, RouterParams):
            return self.node_params
        return self.node_params[i]


@dataclass
class NetworkState:
    nodes: list  # of RouterState
    t: float = 0.0


def coupling_term(state: NetworkState, spec: NetworkSpec, i: int) -> float:
    """Diffusive energy inflow g * sum_{j in N_i} (x_j - x_i)."""
    if not (0 <= i < spec.n_nodes):
        raise IndexError(f"node index {i} outside [0, {spec.n_nodes})")
    x_i = state.nodes[i].x
    acc = 0.0
    for j in spec.adjacency[i]:
        acc += state.nodes[j].x - x_i
    return spec.g * acc


def network_step(
    state: NetworkState,
    spec: NetworkSpec,
    dt: float,
    rngs: Sequence[np.random.Generator],
    *,
    p_load: float = 0.3,
    x_max: float = 10.0,
    push: bool = True,
) -> NetworkState:
    """Synchronous update: couplings from the pre-step state, then one
    Euler-Maruyama step per node with its own RNG stream."""
    couplings = [coupling_term(state, spec, i) for i in range(spec.n_nodes)]
    t = state.t
    for i in range(spec.n_nodes):
        em_step(
            state.nodes[i],
            t,
            dt,
            spec.schedules[i],
            spec.params_for(i),
            rngs[i],
            p_load=p_load,
            x_max=x_max,
            extra_drift=couplings[i],
            push=push,
        )
    state.t = t + dt
    return state


def _node_rngs(seed, n: int) -> list:
    """Per-node generators; seed is an int/SeedSequence (spawned per node)
    or an explicit per-node sequence of seeds."""
    if isinstance(seed, (list, tuple)):
        if len(seed) != n:
            raise ValueError(f"need {n} per-node seeds, got {len(seed)}")
        return [np.random.default_rng(s) for s in seed]
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in seed.spawn(n)]


def run_network(
    spec: NetworkSpec,
    est_cfg: EstimatorConfig = EstimatorConfig(),
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
) -> list:
    """Closed-loop network run; returns one record list per node.

    Per-node control decisions run on the same cadence as run_single and
    each record carries the node's diffusive inflow at decision time.
    Bit-reproducible per seed.
    """
    if spec.schedules is None:
        raise ValueError("spec.schedules is required for run_network")
    if not (t_end > 0.0):
        raise ValueError(f"t_end must be > 0, got {t_end}")
    if not (dt > 0.0):
        raise ValueError(f"dt must be > 0, got {dt}")
    if control_interval < 1:
        raise ValueError(f"control_interval must be >= 1, got {control_interval}")
    stride = _estimator_stride(est_cfg, dt)

    rngs = _node_rngs(seed, spec.n_nodes)
    state = NetworkState(
        nodes=[
            RouterState(x=float(x0), u=float(u0), estimator=EstimatorState(est_cfg))
            for _ in range(spec.n_nodes)
        ]
    )
    for node in state.nodes:
        push_sample(node.estimator, node.x)

    records = [[] for _ in range(spec.n_nodes)]
    n_steps = round(t_end / dt)
    for k in range(n_steps):
        t = k * dt
        if k % control_interval == 0:
            for i in range(spec.n_nodes):
                params = spec.params_for(i)
                j_value = _decide(state.nodes[i], params, opt_tol, opt_grid)
                records[i].append(
                    _record(
                        state.nodes[i],
                        t,
                        spec.schedules[i].d_of_t(t),
                        j_value,
                        params,
                        coupling_flux=coupling_term(state, spec, i),
                    )
                )
        network_step(
            state,
            spec,
            dt,
            rngs,
            p_load=p_load,
            x_max=x_max,
            push=((k + 1) % stride == 0),
        )
    return records


@dataclass(frozen=True)
class BurstScenario:
    """Reference burst protocol for the collective critical point.

    One designated node's noise intensity is raised to a trial level for a
    fixed duration on top of a quiet baseline; the node has abandoned when
    its control effort, averaged over the trailing t_measure of the burst
    (after the estimator window has fully turned over), falls below
    ``floor``. Buffers are wide and start mid-range so clamping never
    interferes, the load drain is off, and the estimator samples at a
    coarse interval est_dt -- the lag at which diffusive coupling visibly
    dilutes realized variance. The window must turn over inside the burst:
    window_len*est_dt + t_measure <= t_burst.
    """

    node: int = 0
    base_d: float = 0.5
    p_mean: float = 1.0
    t_warm: float = 30.0
    t_burst: float = 75.0
    t_measure: float = 12.0
    dt: float = 0.0125
    control_interval: int = 32
    window_len: int = 150
    est_dt: float = 0.4
    floor: float = 1e-3
    p_load: float = 0.0
    x0: float = 1000.0
    x_max: float = 1e6
    u0: float = 1.0

    def __post_init__(self):
        if self.node < 0:
            raise ValueError(f"node must be >= 0, got {self.node}")
        if self.base_d < 0.0:
            raise ValueError(f"base_d must be >= 0, got {self.base_d}")
        if not (self.t_warm >= 0.0 and self.t_burst > 0.0 and self.t_measure > 0.0):
            raise ValueError("burst timings must be positive")
        if self.window_len * self.est_dt + self.t_measure > self.t_burst:
            raise ValueError(
                "estimator window plus measurement tail must fit inside the burst"
            )
        if not (self.floor > 0.0):
            raise ValueError(f"floor must be > 0, got {self.floor}")

    @property
    def t_end(self) -> float:
        return self.t_warm + self.t_burst

    def estimator_config(self) -> EstimatorConfig:
        return EstimatorConfig(window_len=self.window_len, dt=self.est_dt)

    def schedules_for(self, spec: NetworkSpec, d_trial: float) -> tuple:
        """Baseline schedules with the designated node's burst override."""
        if not (0 <= self.node < spec.n_nodes):
            raise ValueError(f"burst node {self.node} outside [0, {spec.n_nodes})")
        base = constant_schedule(p_mean=self.p_mean, d=self.base_d)
        burst = piecewise_schedule(
            times=[0.0, self.t_warm, self.t_warm + self.t_burst],
            p_values=[self.p_mean, self.p_mean, self.p_mean],
            d_values=[self.base_d, float(d_trial), self.base_d],
        )
        return tuple(
            burst if i == self.node else base for i in range(spec.n_nodes)
        )


def burst_tail_control(
    spec: NetworkSpec, scenario: BurstScenario, d_trial: float, seed
) -> float:
    """Mean u* of the burst node over the scenario's measurement tail."""
    trial_spec = replace(spec, schedules=scenario.schedules_for(spec, d_trial))
    records = run_network(
        trial_spec,
        est_cfg=scenario.estimator_config(),
        t_end=scenario.t_end,
        dt=scenario.dt,
        control_interval=scenario.control_interval,
        seed=seed,
        p_load=scenario.p_load,
        x_max=scenario.x_max,
        x0=scenario.x0,
        u0=scenario.u0,
    )
    t_tail = scenario.t_end - scenario.t_measure
    tail = [r.u_star for r in records[scenario.node] if r.t >= t_tail]
    if not tail:
        raise ValueError("empty measurement tail; check scenario timings")
    return float(sum(tail) / len(tail))


def network_critical(
    spec: NetworkSpec,
    scenario: BurstScenario,
    d_lo: float,
    d_hi: float,
    tol: float = 0.1,
    seeds: Sequence[int] = tuple(range(8)),
) -> float:
    """Critical burst intensity of the designated node, median over seeds.

    Per seed, bisects the trial level on the abandonment indicator (tail
    control average below scenario.floor). Requires control alive at d_lo
    and abandoned at d_hi for every seed; raises NotBracketedError
    otherwise. Reusing one seed list across coupling strengths makes the
    g comparison a common-random-numbers experiment.
    """
    if not (0.0 <= d_lo < d_hi):
        raise ValueError(f"need 0 <= d_lo < d_hi, got [{d_lo}, {d_hi}]")
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol}")
    if not seeds:
        raise ValueError("need at least one seed")
    estimates = []
    for s in seeds:
        if burst_tail_control(spec, scenario, d_lo, s) < scenario.floor:
            raise NotBracketedError(f"seed {s}: already abandoned at d_lo = {d_lo}")
        if burst_tail_control(spec, scenario, d_hi, s) >= scenario.floor:
            raise NotBracketedError(f"seed {s}: control still active at d_hi = {d_hi}")
        lo, hi = d_lo, d_hi
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if burst_tail_control(spec, scenario, mid, s) < scenario.floor:
                hi = mid
            else:
                lo = mid
        estimates.append(0.5 * (lo + hi))
    return float(np.median(estimates))
