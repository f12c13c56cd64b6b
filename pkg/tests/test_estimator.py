import math

import numpy as np
import pytest

from ratchetgrid import (
    EstimatorConfig,
    EstimatorState,
    InsufficientSamplesError,
    current_estimate,
    push_sample,
)


def fresh(window_len=100, dt=1e-3):
    return EstimatorState(EstimatorConfig(window_len=window_len, dt=dt))


def test_constant_series_estimates_zero():
    state = fresh()
    for _ in range(20):
        push_sample(state, 5.0)
    assert current_estimate(state) == 0.0


def test_alternating_increments():
    state = fresh(dt=0.01)
    x = 0.0
    push_sample(state, x)
    for k in range(50):
        x += 0.1 if k % 2 == 0 else -0.1
        push_sample(state, x)
    assert current_estimate(state) == pytest.approx(0.1**2 / (2 * 0.01), rel=1e-12)


def test_single_increment():
    state = fresh(dt=0.5)
    push_sample(state, 0.0)
    push_sample(state, 1.0)
    assert current_estimate(state) == pytest.approx(1.0, abs=1e-15)


def test_insufficient_samples():
    state = fresh()
    with pytest.raises(InsufficientSamplesError):
        current_estimate(state)
    push_sample(state, 1.0)
    with pytest.raises(InsufficientSamplesError):
        current_estimate(state)


def test_estimate_matches_state_field():
    rng = np.random.default_rng(3)
    state = fresh(window_len=50)
    for x in np.cumsum(rng.standard_normal(500)):
        push_sample(state, float(x))
    assert current_estimate(state) == state.d_hat


def test_rejects_non_finite():
    state = fresh()
    with pytest.raises(ValueError):
        push_sample(state, float("nan"))
    with pytest.raises(ValueError):
        push_sample(state, float("inf"))


def test_shift_invariance():
    rng = np.random.default_rng(5)
    xs = np.cumsum(rng.standard_normal(300))
    a, b = fresh(), fresh()
    for x in xs:
        push_sample(a, float(x))
        push_sample(b, float(x) + 1234.5)
    assert current_estimate(b) == pytest.approx(current_estimate(a), rel=1e-9)


def test_quadratic_scaling():
    rng = np.random.default_rng(6)
    xs = np.cumsum(rng.standard_normal(300))
    a, b = fresh(), fresh()
    for x in xs:
        push_sample(a, float(x))
        push_sample(b, 3.0 * float(x))
    assert current_estimate(b) == pytest.approx(9.0 * current_estimate(a), rel=1e-9)


def test_window_truncation():
    # only the last W increments contribute
    w, dt = 10, 0.1
    rng = np.random.default_rng(8)
    xs = [float(x) for x in np.cumsum(rng.standard_normal(35))]
    state = fresh(window_len=w, dt=dt)
    for x in xs:
        push_sample(state, x)
    incs = np.diff(np.array(xs))[-w:]
    expected = float(np.mean(incs**2)) / (2 * dt)
    assert current_estimate(state) == pytest.approx(expected, rel=1e-9)


def test_warmup_uses_available_increments():
    state = fresh(window_len=100, dt=0.2)
    push_sample(state, 0.0)
    push_sample(state, 2.0)
    push_sample(state, 2.0)
    # mean of squared increments {4.0, 0.0} over 2*dt
    assert current_estimate(state) == pytest.approx(2.0 / 0.4, rel=1e-12)


def test_monte_carlo_consistency():
    # pure diffusion x_{k+1} = x_k + sqrt(2 D dt) z, D = 1
    d_true, dt = 1.0, 1e-3
    rng = np.random.default_rng(42)
    state = fresh(window_len=10_000, dt=dt)
    x = 0.0
    push_sample(state, x)
    for z in rng.standard_normal(10_000):
        x += math.sqrt(2 * d_true * dt) * float(z)
        push_sample(state, x)
    assert current_estimate(state) == pytest.approx(d_true, rel=0.05)


def test_consistency_improves_with_window():
    # relative error shrinks from 1k to 100k increments
    d_true, dt = 1.0, 1e-3
    errs = {}
    for w in (1_000, 100_000):
        per_seed = []
        for seed in range(3):
            rng = np.random.default_rng(seed)
            state = fresh(window_len=w, dt=dt)
            x = 0.0
            push_sample(state, x)
            for z in rng.standard_normal(w):
                x += math.sqrt(2 * d_true * dt) * float(z)
                push_sample(state, x)
            per_seed.append(abs(current_estimate(state) - d_true))
        errs[w] = np.mean(per_seed)
    assert errs[100_000] < errs[1_000]


def test_config_validation():
    with pytest.raises(ValueError):
        EstimatorConfig(window_len=0)
    with pytest.raises(ValueError):
        EstimatorConfig(dt=0.0)
