"""Drift-gap sweeps and their CSV form."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .bandit_core import DEFAULT_DRIFT_BOUND, BatchGrid, ThetaParams
from .errors import ConfigurationError
from .mc_harness import DEFAULT_REPS, LossEstimate, estimate_loss
from .rng import mix_seed
from .ucb_policy import PolicyConfig

CSV_HEADER = "d,l_hat,stderr,reps,a,J,M,K,N,seed"
CSV_COLUMNS = CSV_HEADER.split(",")


class CurveParseError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


@dataclass
class SweepConfig:
    """One loss curve over a grid of drift gaps.

    In gap mode the grid is ``d_min, d_min + d_step, ..., <= d_max`` and two
    arms get drifts ``(+d/2, -d/2)``.  In list mode ``d_list`` gives explicit
    drift vectors, keyed in the curve by their gap ``max(d) - min(d)``.
    Give exactly one of ``N`` (horizon) and ``K`` (batch count).
    """

    a: float = 1.0 / 3.0
    J: int = 2
    M: int = 1
    N: Optional[int] = None
    K: Optional[int] = None
    d_min: Optional[float] = None
    d_max: Optional[float] = None
    d_step: Optional[float] = None
    d_list: Optional[list] = None
    reps: int = DEFAULT_REPS
    master_seed: int = 0
    workers: int = 1
    out_path: Optional[str] = None
    m: float = 0.0
    D: float = 1.0
    C: float = DEFAULT_DRIFT_BOUND
    process: str = "concrete"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if (self.N is None) == (self.K is None):
            raise ConfigurationError("give exactly one of the horizon N and the batch count K")
        gap_mode = any(x is not None for x in (self.d_min, self.d_max, self.d_step))
        if gap_mode == (self.d_list is not None):
            raise ConfigurationError("give exactly one of a gap grid (d_min, d_max, d_step) or d_list")
        if gap_mode:
            if None in (self.d_min, self.d_max, self.d_step):
                raise ConfigurationError("gap grid needs d_min, d_max and d_step")
            if not self.d_step > 0:
                raise ConfigurationError(f"d_step must be positive, got {self.d_step}")
            if not self.d_min <= self.d_max:
                raise ConfigurationError(f"d_min={self.d_min} exceeds d_max={self.d_max}")
            if self.J != 2:
                raise ConfigurationError("the symmetric gap grid is for J = 2 arms; use d_list for more")
        else:
            if not self.d_list:
                raise ConfigurationError("d_list is empty")
            for vec in self.d_list:
                if len(vec) != self.J:
                    raise ConfigurationError(f"drift vector {vec} does not have J={self.J} entries")
            gaps = [max(v) - min(v) for v in self.d_list]
            if any(b <= a for a, b in zip(gaps, gaps[1:])):
                raise ConfigurationError(f"d_list gaps {gaps} must be strictly increasing")
        if self.reps < 2:
            raise ConfigurationError(f"reps must be >= 2, got {self.reps}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        self.grid()

    def grid(self) -> BatchGrid:
        if self.N is not None:
            return BatchGrid.from_horizon(self.J, self.M, self.N)
        return BatchGrid(self.J, self.M, self.K)

    def gap_values(self) -> list[float]:
        if self.d_list is not None:
            return [max(v) - min(v) for v in self.d_list]
        n = math.floor((self.d_max - self.d_min) / self.d_step + 1e-9)
        return [self.d_min + i * self.d_step for i in range(n + 1)]

    def drift_vectors(self) -> list[tuple[float, ...]]:
        if self.d_list is not None:
            return [tuple(float(x) for x in v) for v in self.d_list]
        return [(0.5 * d, -0.5 * d) for d in self.gap_values()]


@dataclass
class LossCurve:
    points: list[tuple[float, LossEstimate]] = field(default_factory=list)

    def __post_init__(self):
        ds = [d for d, _ in self.points]
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise ValueError("curve points must have strictly increasing d")

    @property
    def d(self) -> list[float]:
        return [d for d, _ in self.points]

    @property
    def means(self) -> list[float]:
        return [e.mean for _, e in self.points]

    def peak(self) -> tuple[float, float]:
        """``(d, l_hat)`` at the largest estimate."""
        i = max(range(len(self.points)), key=lambda j: self.points[j][1].mean)
        return self.points[i][0], self.points[i][1].mean


def run_sweep(config: SweepConfig) -> LossCurve:
    config.validate()
    grid = config.grid()
    policy = PolicyConfig(a=config.a, J=config.J, M=config.M, D=config.D)
    points = []
    for index, (gap, drifts) in enumerate(zip(config.gap_values(), config.drift_vectors())):
        theta = ThetaParams(m=config.m, D=config.D, d=drifts, C=config.C)
        est = estimate_loss(
            theta,
            grid,
            policy,
            reps=config.reps,
            master_seed=mix_seed(config.master_seed, index),
            workers=config.workers,
            process=config.process,
        )
        points.append((gap, est))
    return LossCurve(points)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_csv(curve: LossCurve, config: SweepConfig, path) -> None:
    grid = config.grid()
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(CSV_HEADER + "\n")
            for d, est in curve.points:
                row = [_fmt(d), _fmt(est.mean), _fmt(est.stderr), str(est.reps), _fmt(config.a),
                       str(grid.J), str(grid.M), str(grid.K), str(grid.N), str(config.master_seed)]
                fh.write(",".join(row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


def read_curve_csv(path) -> list[dict]:
    """Parse a sweep CSV into typed row dicts; raises :class:`CurveParseError`."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_COLUMNS:
            raise CurveParseError(path, 1, f"expected header {CSV_HEADER!r}, got {header!r}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(CSV_COLUMNS):
                raise CurveParseError(path, lineno, f"expected {len(CSV_COLUMNS)} fields, got {len(raw)}")
            try:
                rows.append(
                    dict(d=float(raw[0]), l_hat=float(raw[1]), stderr=float(raw[2]), reps=int(raw[3]),
                         a=float(raw[4]), J=int(raw[5]), M=int(raw[6]), K=int(raw[7]), N=int(raw[8]),
                         seed=int(raw[9]))
                )
            except ValueError as exc:
                raise CurveParseError(path, lineno, str(exc)) from None
    return rows
