"""Randomized batch UCB rule.

After every batch the rule scores each arm by::

    U_l = X_l / k_l + a * sqrt(M * D) / sqrt(k_l) * (2 + zeta_l)

where ``k_l`` counts batches given to arm ``l``, ``X_l`` is their total
income and ``zeta_l`` is a fresh standard exponential.  The first ``J``
batches visit arms in order; afterwards the highest score wins, ties going
to the lowest index.  With ``M = 1`` this is the per-item rule.

Arms are indexed from 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Protocol, Sequence

from .bandit_core import BatchGrid, ThetaParams, arm_means, batch_income
from .errors import ConfigurationError, PreconditionError


class NoiseSource(Protocol):
    def exponential(self) -> float: ...

    def normal(self) -> float: ...


@dataclass(frozen=True)
class PolicyConfig:
    a: float
    J: int
    M: int
    D: float

    def __post_init__(self):
        if not (self.a >= 0 and math.isfinite(self.a)):
            raise ConfigurationError(f"exploration coefficient a must be >= 0, got {self.a}")
        if self.a == 0:
            warnings.warn("a = 0 disables exploration; the rule is only meaningful for a > 0", stacklevel=3)
        if self.J < 2 or self.M < 1:
            raise ConfigurationError(f"need J >= 2 and M >= 1, got J={self.J}, M={self.M}")
        if not self.D > 0:
            raise ConfigurationError(f"variance D must be positive, got {self.D}")


@dataclass(frozen=True)
class PolicyState:
    k: int
    counts: tuple[int, ...]
    sums: tuple[float, ...]

    @classmethod
    def initial(cls, J: int) -> "PolicyState":
        return cls(0, (0,) * J, (0.0,) * J)


def sample_perturbation(u: float) -> float:
    """Standard exponential variate from a uniform ``u`` in (0, 1]."""
    if not 0.0 < u <= 1.0:
        raise ValueError(f"uniform draw must lie in (0, 1], got {u}")
    return -math.log(u)


def ucb_bound(arm: int, state: PolicyState, config: PolicyConfig, zeta: float) -> float:
    n = state.counts[arm]
    if n < 1:
        raise PreconditionError(f"arm {arm} has not been pulled; its bound is undefined")
    return state.sums[arm] / n + config.a * math.sqrt(config.M * config.D) / math.sqrt(n) * (2.0 + zeta)


def ucb_bounds(state: PolicyState, config: PolicyConfig, perturbations: Sequence[float]) -> list[float]:
    return [ucb_bound(arm, state, config, perturbations[arm]) for arm in range(config.J)]


def argmax_first(values: Sequence[float]) -> int:
    """Index of the largest value; the lowest index wins ties."""
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def select_arm(state: PolicyState, config: PolicyConfig, perturbations: Sequence[float]) -> int:
    if len(perturbations) != config.J:
        raise ValueError(f"expected {config.J} perturbations, got {len(perturbations)}")
    if state.k < config.J:
        return state.k
    return argmax_first(ucb_bounds(state, config, perturbations))


def update(state: PolicyState, arm: int, batch_income: float) -> PolicyState:
    if not 0 <= arm < len(state.counts):
        raise IndexError(f"arm index {arm} out of range for J={len(state.counts)}")
    counts = list(state.counts)
    sums = list(state.sums)
    counts[arm] += 1
    sums[arm] += batch_income
    return PolicyState(state.k + 1, tuple(counts), tuple(sums))


class BatchRecord(NamedTuple):
    """One decision: batch index (0-based), chosen arm, scores, perturbations, normal draw.

    ``bounds`` is None during the round-robin phase.
    """

    batch: int
    arm: int
    bounds: Optional[tuple[float, ...]]
    zetas: tuple[float, ...]
    z: float


def play(
    theta: ThetaParams, grid: BatchGrid, config: PolicyConfig, noise: NoiseSource
) -> Iterator[tuple[BatchRecord, PolicyState]]:
    """Run ``grid.K`` batches, yielding each decision with the state after it.

    Per batch the noise source is read in a fixed order: ``J`` exponentials
    (one per arm, also during round-robin), then one normal for the chosen
    arm's batch income.
    """
    if not (theta.J == grid.J == config.J) or grid.M != config.M or theta.D != config.D:
        raise ConfigurationError("theta, grid and policy config disagree on J, M or D")
    means = arm_means(theta, grid)
    state = PolicyState.initial(grid.J)
    for batch in range(grid.K):
        zetas = tuple(noise.exponential() for _ in range(grid.J))
        if state.k < grid.J:
            arm, bounds = state.k, None
        else:
            bounds = tuple(ucb_bounds(state, config, zetas))
            arm = argmax_first(bounds)
        z = noise.normal()
        state = update(state, arm, batch_income(means[arm], grid.M, theta.D, z))
        yield BatchRecord(batch, arm, bounds, zetas, z), state
