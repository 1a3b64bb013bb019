import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batch_ucb import (
    BatchGrid,
    ConfigurationError,
    InvariantState,
    PolicyConfig,
    PreconditionError,
    ThetaParams,
    couple_check,
    invariant_bound,
    run_invariant_episode,
    transform_bound,
)
from batch_ucb.invariant_engine import compare_traces, invariant_play
from batch_ucb.mc_harness import simulate_counts
from batch_ucb.rng import Stream, mix_seed

SETTINGS = [(1, 1, 0), (10, 0.25, 5), (50, 4, -3)]


def state_with(counts, noise, K):
    return InvariantState(sum(counts), tuple(counts), 1 / K, tuple(noise))


def test_invariant_bound_examples():
    s = state_with((1, 1), (0.0, 0.0), 4)
    oracle = 0.5 + (1 / 3) * (1 / math.sqrt(0.25)) * 2
    assert invariant_bound(0, s, (0.5, -0.5), 1 / 3, 0.0, 0.25) == pytest.approx(oracle, abs=1e-15)
    assert oracle == pytest.approx(1.8333333333333333, abs=1e-15)
    assert invariant_bound(0, s, (0.5, -0.5), 0.0, 3.0, 0.25) == 0.5
    s = state_with((1, 1), (0.1, 0.0), 2)
    assert invariant_bound(0, s, (0.0, 0.0), 0.0, 0.0, 0.5) == pytest.approx(0.2, abs=1e-15)


def test_invariant_bound_needs_a_pull():
    with pytest.raises(PreconditionError):
        invariant_bound(1, state_with((2, 0), (0.0, 0.0), 4), (0, 0), 1 / 3, 0.0, 0.25)


def test_transform_bound_examples():
    assert transform_bound(3 * 2.5, 2.5, 3, 0.7, 11) == 0.0
    assert transform_bound(7, 5, 1, 1, 4) == 4.0
    assert transform_bound(2, 0, 4, 0.25, 9) == 6.0
    with pytest.raises(ConfigurationError):
        transform_bound(1, 0, 1, 0, 4)


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(-1e3, 1e3),
       st.integers(1, 100), st.floats(1e-3, 1e3), st.integers(1, 10_000))
def test_transform_preserves_order(u1, u2, m, M, D, K):
    if u1 < u2:
        assert transform_bound(u1, m, M, D, K) <= transform_bound(u2, m, M, D, K)


def test_episode_rejects_short_horizon_and_starts_round_robin():
    with pytest.raises(ConfigurationError):
        run_invariant_episode((1.0, -1.0), 1 / 3, 2, Stream(0))
    arms, t_l = run_invariant_episode((1.0, -1.0), 1 / 3, 3, Stream(0))
    assert arms[:2] == [0, 1] and len(arms) == 3
    assert sum(t_l) == pytest.approx(1.0, abs=4 * math.ulp(1.0))


def test_episode_is_deterministic():
    a = run_invariant_episode((1.0, 0.0, -1.0), 0.3, 60, Stream(99))
    b = run_invariant_episode((1.0, 0.0, -1.0), 0.3, 60, Stream(99))
    assert a == b


def test_large_gap_greedy_at_short_horizon(quiet):
    # a = 0, gap 10, K = 4: after round-robin each arm's score is d_l + sqrt(K) z_l,
    # so the best arm leads with probability Phi(10 / sqrt(2 K)) = 1 - 2e-4
    theta, grid = ThetaParams(0, 1, (5, -5)), BatchGrid(2, 1, 4)
    counts = simulate_counts(theta, grid, PolicyConfig(0.0, 2, 1, 1), 100_000, 3, process="invariant")
    assert (counts[:, 0] - 1).sum() / (100_000 * 2) > 0.999


@pytest.mark.parametrize("K", [3, 25, 100])
def test_first_greedy_choice_probability(K):
    # the first post-initialization pick is arm 0 iff 5 + sqrt(K) z_0 > -5 + sqrt(K) z_1
    reps = 4000
    p = 0.5 * (1 + math.erf(10 / math.sqrt(2 * K) / math.sqrt(2)))
    picks = [run_invariant_episode((5, -5), 0.0, K, Stream(mix_seed(12, i)))[0][2] for i in range(reps)]
    rate = picks.count(0) / reps
    assert abs(rate - p) < 4 * math.sqrt(p * (1 - p) / reps) + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(4, 300))
def test_occupation_conservation(seed, K):
    for _, state in invariant_play((0.5, 0.0, -0.5), 0.4, K, Stream(seed)):
        assert sum(state.t_l) == pytest.approx(state.t, abs=4 * math.ulp(max(state.t, 1e-300)))
        assert 0 <= state.t <= 1 + 1e-15


def test_compensated_noise_sums_track_exact_total():
    s = InvariantState.initial(2, 10_000)
    zs = np.random.default_rng(1).standard_normal(10_000)
    for z in zs:
        s = s.advance(0, float(z))
    exact = math.fsum(math.sqrt(1 / 10_000) * float(z) for z in zs)
    assert abs(s.noise_total(0) - exact) <= 2 * math.ulp(exact)


def test_couple_check_passes_on_reference_case():
    report = couple_check((1.75, -1.75), 1 / 3, 200, SETTINGS, master_seed=5)
    assert report.passed, report.render()
    assert report.max_deviation <= 1e-9
    assert "PASS" in report.render()


def test_reflexivity():
    trace = [rec for rec, _ in invariant_play((1.0, -1.0), 1 / 3, 150, Stream(8))]
    worst, batch, _ = compare_traces(trace, trace)
    assert (worst, batch) == (0.0, None)


def test_mismatched_exploration_decouples():
    failures = 0
    for seed in range(100):
        report = couple_check((1.75, -1.75), 1 / 3, 200, [(1, 1, 0, 2 / 15)], master_seed=seed)
        failures += not report.passed
        if not report.passed:
            assert report.first_divergence is not None and 2 <= report.first_divergence < 200
    assert failures == 100


def test_couple_check_rejects_bad_settings():
    with pytest.raises(ConfigurationError):
        couple_check((1.0, -1.0), 1 / 3, 50, [(0, 1, 0)], master_seed=0)
    with pytest.raises(ConfigurationError):
        couple_check((1.0, -1.0), 1 / 3, 50, [(1, -1, 0)], master_seed=0)


def test_three_arm_coupling():
    report = couple_check((2.0, 0.0, -1.5), 0.25, 300, SETTINGS, master_seed=17)
    assert report.passed, report.render()
