import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batch_ucb import (
    BatchGrid,
    ConfigurationError,
    PolicyConfig,
    ThetaParams,
    estimate_loss,
    run_episode,
    run_invariant_episode,
    scaled_loss,
    unscale_loss,
)
from batch_ucb.mc_harness import run_invariant_replication, scaled_losses, simulate_counts
from batch_ucb.rng import Stream, mix_seed

# tests/oracle.py with gap 3.5, a = 1/3, N = 50, reps = 10**6, seed 2024
ORACLE_K50_MEAN = 0.73047751
ORACLE_K50_STDERR = 0.0007880515271918515


def setup(d=(1.75, -1.75), K=100, M=1, D=1.0, m=0.0, a=1 / 3):
    return ThetaParams(m, D, d), BatchGrid(len(d), M, K), PolicyConfig(a, len(d), M, D)


def test_scaled_loss_examples():
    assert scaled_loss((60, 40), (1.75, -1.75), 100) == pytest.approx(1.4, abs=1e-15)
    assert scaled_loss((60, 40), (2, 2), 100) == 0.0
    assert scaled_loss((50, 30, 20), (1, 0, -1), 100) == pytest.approx(0.7, abs=1e-15)
    assert scaled_loss((20, 30, 50), (-1, 0, 1), 100) == pytest.approx(0.7, abs=1e-15)
    with pytest.raises(ValueError):
        scaled_loss((1, 2, 3), (0, 1), 6)


def test_vectorized_loss_is_bitwise_scalar_loss():
    counts = np.random.default_rng(0).integers(0, 50, size=(200, 3))
    d = (0.3, 1.7, -2.2)
    vec = scaled_losses(counts, d, 77)
    assert [scaled_loss(tuple(c), d, 77) for c in counts] == vec.tolist()


def test_unscale_examples():
    assert unscale_loss(0.0, 3.0, 7) == 0.0
    assert unscale_loss(0.75, 1.0, 100) == pytest.approx(7.5, abs=1e-15)
    assert unscale_loss(1.4, 0.25, 400) == pytest.approx(14.0, abs=1e-14)


def test_noise_free_episode(zero_noise, quiet):
    theta, grid, cfg = setup(d=(5, -5), K=3, a=0.0)
    out = run_episode(theta, grid, cfg, rep_seed=0, noise=zero_noise)
    assert out.final_counts == (2, 1)
    assert out.scaled_loss == pytest.approx(10 / 3, abs=1e-15)


def test_episode_determinism():
    theta, grid, cfg = setup()
    assert run_episode(theta, grid, cfg, 123, 4) == run_episode(theta, grid, cfg, 123, 4)


@pytest.mark.parametrize("M,D,m", [(1, 1.0, 0.0), (7, 0.3, 12.0)])
def test_concrete_and_invariant_arm_sequences_coincide(M, D, m):
    from batch_ucb.ucb_policy import play

    theta, grid, cfg = setup(K=250, M=M, D=D, m=m)
    arms = [rec.arm for rec, _ in play(theta, grid, cfg, Stream(31))]
    inv_arms, _ = run_invariant_episode(theta.d, cfg.a, grid.K, Stream(31))
    assert arms == inv_arms


def test_zero_gap_estimate_is_exactly_zero():
    theta, grid, cfg = setup(d=(0.0, 0.0), K=40)
    est = estimate_loss(theta, grid, cfg, reps=500, master_seed=3)
    assert (est.mean, est.stderr) == (0.0, 0.0)


def test_reps_must_allow_stderr():
    with pytest.raises(ConfigurationError):
        estimate_loss(*setup(), reps=1)


@pytest.mark.parametrize(
    "d,K,M,D,m,a",
    [((1.75, -1.75), 60, 1, 1.0, 0.0, 1 / 3), ((1.0, 0.0, -2.0), 45, 5, 0.4, -2.0, 0.25), ((3.0, 2.9), 30, 2, 2.0, 100.0, 0.5)],
)
@pytest.mark.parametrize("process", ["concrete", "invariant"])
def test_compiled_engine_matches_reference(d, K, M, D, m, a, process):
    theta, grid, cfg = setup(d=d, K=K, M=M, D=D, m=m, a=a)
    fast = estimate_loss(theta, grid, cfg, reps=60, master_seed=11, process=process)
    slow = estimate_loss(theta, grid, cfg, reps=60, master_seed=11, process=process, engine="reference")
    assert fast == slow


def test_reference_outcomes_match_kernel_counts():
    theta, grid, cfg = setup(K=80)
    counts = simulate_counts(theta, grid, cfg, 30, master_seed=9)
    for i in range(30):
        assert run_episode(theta, grid, cfg, mix_seed(9, i), i).final_counts == tuple(counts[i])
        assert run_invariant_replication(theta.d, cfg.a, grid.K, mix_seed(9, i)).final_counts == tuple(counts[i])


def test_worker_count_does_not_change_estimate():
    theta, grid, cfg = setup(K=120)
    runs = [estimate_loss(theta, grid, cfg, reps=3001, master_seed=4, workers=w) for w in (1, 4, 16)]
    assert runs[0] == runs[1] == runs[2]


def test_concrete_and_invariant_kernels_agree():
    theta, grid, cfg = setup(K=300, M=10, D=0.25, m=5.0)
    a = simulate_counts(theta, grid, cfg, 2000, master_seed=21, process="concrete")
    b = simulate_counts(theta, grid, cfg, 2000, master_seed=21, process="invariant")
    assert np.array_equal(a, b)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**64 - 1), st.floats(-8, 8), st.integers(3, 200), st.floats(0.0, 1.0))
def test_replication_loss_bounds(seed, gap, K, a):
    theta, grid, _ = setup(d=(gap / 2, -gap / 2), K=K)
    counts = simulate_counts(theta, grid, PolicyConfig(max(a, 1e-3), 2, 1, 1.0), 50, seed)
    losses = scaled_losses(counts, theta.d, K)
    assert (counts.sum(axis=1) == K).all()
    assert (losses >= 0).all()
    assert (losses <= abs(gap) * (K - 1) / K + 1e-12).all()


def test_stderr_shrinks_like_root_reps():
    theta, grid, cfg = setup(K=100)
    small = estimate_loss(theta, grid, cfg, reps=20_000, master_seed=1)
    large = estimate_loss(theta, grid, cfg, reps=40_000, master_seed=2)
    assert small.stderr / large.stderr == pytest.approx(math.sqrt(2), rel=0.15)


def test_small_horizon_matches_frozen_oracle():
    theta, grid, cfg = setup(K=50)
    est = estimate_loss(theta, grid, cfg, reps=10_000, master_seed=77)
    combined = math.hypot(est.stderr, ORACLE_K50_STDERR)
    assert abs(est.mean - ORACLE_K50_MEAN) < 3 * combined


def test_config_echo():
    theta, grid, cfg = setup(K=20)
    est = estimate_loss(theta, grid, cfg, reps=10, master_seed=8)
    assert est.config_echo == dict(a=1 / 3, J=2, M=1, K=20, N=20, d=(1.75, -1.75), master_seed=8)
