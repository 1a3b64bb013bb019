"""Unit-horizon invariant form of the batch UCB process and the coupling check.

Centering and rescaling each score by ``u = (U - M m) * sqrt(K / (M D))``
keeps their order and turns the rule into::

    u_l(t) = d_l + S_l / t_l + a / sqrt(t_l) * (2 + zeta_l)

with ``t_l = k_l / K`` and ``S_l`` the sum of ``sqrt(1/K) * z`` over the
batches given to arm ``l``.  Nothing in it depends on ``M``, ``D`` or ``m``.

:func:`couple_check` drives the concrete process for several ``(M, D, m)``
settings and the invariant process from the same draws and confirms the
arm sequences coincide and the rescaled concrete scores match the
invariant ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .bandit_core import BatchGrid, ThetaParams
from .errors import ConfigurationError, PreconditionError
from .rng import Stream
from .ucb_policy import BatchRecord, NoiseSource, PolicyConfig, argmax_first, play

COUPLING_TOLERANCE = 1e-9


@dataclass(frozen=True)
class InvariantState:
    """Occupation counts and noise sums on the unit horizon.

    ``noise_sums`` carries Neumaier running sums and ``compensation`` the
    matching low-order corrections; the noise total of arm l is their sum.
    """

    step: int
    counts: tuple[int, ...]
    epsilon: float
    noise_sums: tuple[float, ...]
    compensation: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.compensation:
            object.__setattr__(self, "compensation", (0.0,) * len(self.counts))

    @classmethod
    def initial(cls, J: int, K: int) -> "InvariantState":
        return cls(0, (0,) * J, 1.0 / K, (0.0,) * J, (0.0,) * J)

    @property
    def t(self) -> float:
        return self.step * self.epsilon

    @property
    def t_l(self) -> tuple[float, ...]:
        return tuple(c * self.epsilon for c in self.counts)

    def noise_total(self, arm: int) -> float:
        return self.noise_sums[arm] + self.compensation[arm]

    def advance(self, arm: int, z: float) -> "InvariantState":
        """Credit one batch to ``arm`` with noise increment ``sqrt(epsilon) * z``."""
        x = math.sqrt(self.epsilon) * z
        s, c = self.noise_sums[arm], self.compensation[arm]
        total = s + x
        if abs(s) >= abs(x):
            c += (s - total) + x
        else:
            c += (x - total) + s
        counts = list(self.counts)
        sums = list(self.noise_sums)
        comps = list(self.compensation)
        counts[arm] += 1
        sums[arm] = total
        comps[arm] = c
        return InvariantState(self.step + 1, tuple(counts), self.epsilon, tuple(sums), tuple(comps))


def invariant_bound(
    arm: int, state: InvariantState, d: Sequence[float], a: float, zeta: float, epsilon: float
) -> float:
    if state.counts[arm] < 1:
        raise PreconditionError(f"arm {arm} has not been pulled; its invariant bound is undefined")
    t_arm = state.counts[arm] * epsilon
    return d[arm] + state.noise_total(arm) / t_arm + a / math.sqrt(t_arm) * (2.0 + zeta)


def transform_bound(U: float, m: float, M: int, D: float, K: int) -> float:
    if not (D > 0 and M >= 1 and K >= 1):
        raise ConfigurationError(f"transform needs D > 0, M >= 1, K >= 1 (got D={D}, M={M}, K={K})")
    return (U - M * m) * math.sqrt(K / (M * D))


def invariant_play(
    d: Sequence[float], a: float, K: int, noise: NoiseSource
) -> Iterator[tuple[BatchRecord, InvariantState]]:
    """Invariant counterpart of :func:`batch_ucb.ucb_policy.play`; same draw order."""
    J = len(d)
    if J < 2:
        raise ConfigurationError(f"need at least 2 arms, got {J}")
    if K < J + 1:
        raise ConfigurationError(f"K={K} batches leave no step after round-robin; need K >= {J + 1}")
    if not a >= 0:
        raise ConfigurationError(f"exploration coefficient a must be >= 0, got {a}")
    state = InvariantState.initial(J, K)
    eps = state.epsilon
    for batch in range(K):
        zetas = tuple(noise.exponential() for _ in range(J))
        if state.step < J:
            arm, bounds = state.step, None
        else:
            bounds = tuple(invariant_bound(l, state, d, a, zetas[l], eps) for l in range(J))
            arm = argmax_first(bounds)
        z = noise.normal()
        state = state.advance(arm, z)
        yield BatchRecord(batch, arm, bounds, zetas, z), state


def run_invariant_episode(
    d: Sequence[float], a: float, K: int, noise: NoiseSource
) -> tuple[list[int], tuple[float, ...]]:
    """Arm sequence and final occupation fractions of one invariant episode."""
    arms = []
    state = None
    for record, state in invariant_play(d, a, K, noise):
        arms.append(record.arm)
    return arms, state.t_l


@dataclass
class CoupleReport:
    passed: bool
    max_deviation: float
    first_divergence: Optional[int] = None
    failing_setting: Optional[tuple] = None
    reason: str = ""
    settings: list = field(default_factory=list)
    master_seed: Optional[int] = None
    K: int = 0

    def render(self) -> str:
        lines = [
            f"couple_check K={self.K} seed={self.master_seed} settings={self.settings}",
            f"max transformed-bound deviation: {self.max_deviation:.3e} (tolerance {COUPLING_TOLERANCE:g})",
        ]
        if self.passed:
            lines.append("PASS")
        else:
            lines.append(f"FAIL at batch {self.first_divergence} for setting {self.failing_setting}: {self.reason}")
        return "\n".join(lines)


def compare_traces(
    reference: Iterable[BatchRecord], other: Iterable[BatchRecord], rescale=lambda u: u, tol: float = COUPLING_TOLERANCE
) -> tuple[float, Optional[int], str]:
    """Walk two traces in lockstep.

    Returns ``(max_deviation, first_divergent_batch, reason)``; the batch is
    None when the traces agree throughout.
    """
    worst = 0.0
    for ref, rec in zip(reference, other, strict=True):
        if ref.arm != rec.arm:
            return worst, ref.batch, f"arm {rec.arm} chosen instead of {ref.arm}"
        if ref.bounds is not None:
            for u, U in zip(ref.bounds, rec.bounds):
                worst = max(worst, abs(rescale(U) - u))
            if worst > tol:
                return worst, ref.batch, f"transformed bounds deviate by {worst:.3e}"
    return worst, None, ""


def _parse_setting(setting: Sequence[float], a: float) -> tuple[int, float, float, float]:
    if len(setting) not in (3, 4):
        raise ConfigurationError(f"setting must be (M, D, m) or (M, D, m, a), got {setting!r}")
    M, D, m = setting[:3]
    a_s = setting[3] if len(setting) == 4 else a
    if int(M) != M or M < 1 or not D > 0:
        raise ConfigurationError(f"setting {setting!r} needs integer M >= 1 and D > 0")
    return int(M), float(D), float(m), float(a_s)


def couple_check(
    d: Sequence[float],
    a: float,
    K: int,
    concrete_settings: Sequence[Sequence[float]],
    master_seed: int,
) -> CoupleReport:
    """Run concrete and invariant processes on one shared stream and compare them.

    Each setting is ``(M, D, m)``; an optional fourth entry overrides ``a``
    for that concrete run (used to show that a mismatched rule decouples).
    """
    d = tuple(float(x) for x in d)
    parsed = [_parse_setting(s, a) for s in concrete_settings]
    report = CoupleReport(True, 0.0, settings=[tuple(s) for s in concrete_settings], master_seed=master_seed, K=K)
    reference = [rec for rec, _ in invariant_play(d, a, K, Stream(master_seed))]
    bound_c = max(10.0, max(abs(x) for x in d))
    for setting, (M, D, m, a_s) in zip(report.settings, parsed):
        theta = ThetaParams(m=m, D=D, d=d, C=bound_c)
        grid = BatchGrid(J=len(d), M=M, K=K)
        config = PolicyConfig(a=a_s, J=len(d), M=M, D=D)
        concrete = (rec for rec, _ in play(theta, grid, config, Stream(master_seed)))
        worst, batch, reason = compare_traces(
            reference, concrete, rescale=lambda U: transform_bound(U, m, M, D, K)
        )
        report.max_deviation = max(report.max_deviation, worst)
        if batch is not None:
            report.passed = False
            report.first_divergence = batch
            report.failing_setting = setting
            report.reason = reason
            break
    return report
