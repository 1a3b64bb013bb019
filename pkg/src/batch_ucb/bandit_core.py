"""Parameter space of close Gaussian arms and batch-aggregate income sampling.

Arm means live in a shrinking neighbourhood of a baseline ``m``::

    m_l = m + d_l * sqrt(D / N)

and the policy only observes the sum of the ``M`` incomes in a batch, so
a batch is simulated as a single Gaussian draw with mean ``M * m_l`` and
variance ``M * D``.  Per-item incomes are never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigurationError

DEFAULT_DRIFT_BOUND = 10.0


@dataclass(frozen=True)
class ThetaParams:
    """Bandit parameter: baseline mean ``m``, variance ``D``, drifts ``d``.

    ``C`` only bounds ``|d_l|`` for validation.
    """

    m: float
    D: float
    d: tuple[float, ...]
    C: float = DEFAULT_DRIFT_BOUND

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(float(x) for x in self.d))
        if not (self.D > 0 and math.isfinite(self.D)):
            raise ConfigurationError(f"variance D must be positive and finite, got {self.D}")
        if not math.isfinite(self.m):
            raise ConfigurationError(f"baseline m must be finite, got {self.m}")
        if len(self.d) < 2:
            raise ConfigurationError(f"need at least 2 arms, got {len(self.d)} drifts")
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ConfigurationError(f"drift bound C must be positive and finite, got {self.C}")
        bad = [x for x in self.d if not abs(x) <= self.C]
        if bad:
            raise ConfigurationError(f"drifts {bad} exceed the bound C={self.C}")

    @property
    def J(self) -> int:
        return len(self.d)


@dataclass(frozen=True)
class BatchGrid:
    """Horizon bookkeeping: ``J`` arms, ``K`` batches of ``M`` items, ``N = M * K``."""

    J: int
    M: int
    K: int

    def __post_init__(self):
        for name in ("J", "M", "K"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.J < 2:
            raise ConfigurationError(f"need at least 2 arms, got J={self.J}")
        if self.K < self.J + 1:
            raise ConfigurationError(
                f"K={self.K} batches leave no step after the round-robin phase; need K >= J+1={self.J + 1}"
            )

    @classmethod
    def from_horizon(cls, J: int, M: int, N: int) -> "BatchGrid":
        if M < 1 or N < 1 or N % M:
            raise ConfigurationError(f"horizon N={N} is not a positive multiple of batch size M={M}")
        return cls(J=J, M=M, K=N // M)

    @property
    def N(self) -> int:
        return self.M * self.K

    @property
    def epsilon(self) -> float:
        return 1.0 / self.K


def _check_compatible(theta: ThetaParams, grid: BatchGrid) -> None:
    if theta.J != grid.J:
        raise ConfigurationError(f"theta has {theta.J} arms but grid has J={grid.J}")


def arm_means(theta: ThetaParams, grid: BatchGrid) -> tuple[float, ...]:
    _check_compatible(theta, grid)
    scale = math.sqrt(theta.D / grid.N)
    return tuple(theta.m + dl * scale for dl in theta.d)


def sample_batch_income(arm: int, theta: ThetaParams, grid: BatchGrid, z: float) -> float:
    """Total income of one batch on ``arm`` (0-based) given a standard normal ``z``."""
    if not 0 <= arm < theta.J:
        raise IndexError(f"arm index {arm} out of range for J={theta.J}")
    mean = arm_means(theta, grid)[arm]
    return batch_income(mean, grid.M, theta.D, z)


def batch_income(arm_mean: float, M: int, D: float, z: float) -> float:
    return M * arm_mean + math.sqrt(M * D) * z


def drift_gaps(d: Sequence[float]) -> tuple[float, ...]:
    """``max(d) - d_l`` for every arm."""
    top = max(d)
    return tuple(top - x for x in d)
