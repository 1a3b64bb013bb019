"""Replicated episodes and scaled-loss estimation.

The loss of a replication, measured in units of ``sqrt(D N)``, is::

    sum_l (max(d) - d_l) * k_l / K

and its mean over replications estimates the scaled expected loss l(d).
Replication ``i`` draws from ``Stream(mix_seed(master_seed, i))`` whatever
worker runs it, and results are reduced in replication order, so an
estimate is bitwise reproducible for any number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._kernel import simulate_block
from .bandit_core import BatchGrid, ThetaParams, arm_means, drift_gaps
from .errors import ConfigurationError
from .invariant_engine import invariant_play
from .rng import Stream, mix_seed
from .ucb_policy import NoiseSource, PolicyConfig, play

DEFAULT_REPS = 10_000


@dataclass(frozen=True)
class ReplicationOutcome:
    final_counts: tuple[int, ...]
    scaled_loss: float
    rep_index: int = 0


@dataclass(frozen=True)
class LossEstimate:
    mean: float
    stderr: float
    reps: int
    config_echo: dict = field(default_factory=dict)


def scaled_loss(final_counts: Sequence[int], d: Sequence[float], K: int) -> float:
    if len(final_counts) != len(d):
        raise ValueError(f"{len(final_counts)} counts for {len(d)} drifts")
    loss = 0.0
    for gap, k_arm in zip(drift_gaps(d), final_counts):
        loss = loss + gap * (k_arm / K)
    return loss


def scaled_losses(counts: np.ndarray, d: Sequence[float], K: int) -> np.ndarray:
    """Row-wise :func:`scaled_loss`, same operation order."""
    counts = np.asarray(counts)
    if counts.shape[-1] != len(d):
        raise ValueError(f"{counts.shape[-1]} count columns for {len(d)} drifts")
    loss = np.zeros(counts.shape[0])
    for l, gap in enumerate(drift_gaps(d)):
        loss = loss + gap * (counts[:, l] / K)
    return loss


def unscale_loss(scaled: float, D: float, N: int) -> float:
    """Expected loss in income units from its scaled value."""
    if not (D > 0 and N >= 1):
        raise ConfigurationError(f"need D > 0 and N >= 1, got D={D}, N={N}")
    return math.sqrt(D * N) * scaled


def run_episode(
    theta: ThetaParams,
    grid: BatchGrid,
    config: PolicyConfig,
    rep_seed: int,
    rep_index: int = 0,
    noise: Optional[NoiseSource] = None,
) -> ReplicationOutcome:
    """One concrete replication; ``noise`` overrides the seeded stream."""
    noise = Stream(rep_seed) if noise is None else noise
    state = None
    for _, state in play(theta, grid, config, noise):
        pass
    return ReplicationOutcome(state.counts, scaled_loss(state.counts, theta.d, grid.K), rep_index)


def run_invariant_replication(
    d: Sequence[float], a: float, K: int, rep_seed: int, rep_index: int = 0
) -> ReplicationOutcome:
    state = None
    for _, state in invariant_play(d, a, K, Stream(rep_seed)):
        pass
    return ReplicationOutcome(state.counts, scaled_loss(state.counts, d, K), rep_index)


def default_workers() -> int:
    return os.cpu_count() or 1


def simulate_counts(
    theta: ThetaParams,
    grid: BatchGrid,
    config: PolicyConfig,
    reps: int,
    master_seed: int,
    workers: int = 1,
    process: str = "concrete",
) -> np.ndarray:
    """Final arm counts of replications ``0..reps-1``, shape ``(reps, J)``."""
    if process not in ("concrete", "invariant"):
        raise ConfigurationError(f"unknown process {process!r}")
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    counts = np.zeros((reps, grid.J), dtype=np.int64)
    args = (
        np.asarray(arm_means(theta, grid), dtype=np.float64),
        np.asarray(theta.d, dtype=np.float64),
        float(grid.M),
        float(theta.D),
        float(config.a),
        grid.K,
        process == "invariant",
        np.uint64(master_seed & ((1 << 64) - 1)),
    )
    workers = min(workers, reps)
    if workers == 1:
        simulate_block(*args, 0, reps, counts)
        return counts
    edges = np.linspace(0, reps, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        jobs = [pool.submit(simulate_block, *args, int(lo), int(hi), counts) for lo, hi in zip(edges[:-1], edges[1:])]
        for job in jobs:
            job.result()
    return counts


def summarize(losses: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error with compensated summation."""
    losses = [float(x) for x in losses]
    n = len(losses)
    if all(x == losses[0] for x in losses):
        return losses[0], 0.0
    mean = math.fsum(losses) / n
    var = math.fsum((x - mean) ** 2 for x in losses) / (n - 1)
    return mean, math.sqrt(var / n)


def estimate_loss(
    theta: ThetaParams,
    grid: BatchGrid,
    config: PolicyConfig,
    reps: int = DEFAULT_REPS,
    master_seed: int = 0,
    workers: int = 1,
    process: str = "concrete",
    engine: str = "compiled",
) -> LossEstimate:
    """Monte-Carlo estimate of the scaled loss with its standard error.

    ``engine="reference"`` runs the pure-Python path (slow; for cross-checks).
    """
    if reps < 2:
        raise ConfigurationError(f"need reps >= 2 for a standard error, got {reps}")
    if engine == "compiled":
        counts = simulate_counts(theta, grid, config, reps, master_seed, workers, process)
        losses = scaled_losses(counts, theta.d, grid.K).tolist()
    elif engine == "reference":
        if process == "concrete":
            outcomes = [run_episode(theta, grid, config, mix_seed(master_seed, i), i) for i in range(reps)]
        else:
            outcomes = [
                run_invariant_replication(theta.d, config.a, grid.K, mix_seed(master_seed, i), i) for i in range(reps)
            ]
        losses = [o.scaled_loss for o in outcomes]
    else:
        raise ConfigurationError(f"unknown engine {engine!r}")
    mean, stderr = summarize(losses)
    echo = dict(a=config.a, J=grid.J, M=grid.M, K=grid.K, N=grid.N, d=tuple(theta.d), master_seed=master_seed)
    return LossEstimate(mean, stderr, reps, echo)
