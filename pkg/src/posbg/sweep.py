"""Deterministic Monte Carlo sweep harness.

Builds the (p, q) parameter grid, runs a configured number of trials per cell
for each attacker model, aggregates statistics, and serializes results.  The
defining property is reproducibility: every trial's random stream is derived
by counter (master seed, cell index, trial index), so the serialized report
is byte-identical for a fixed configuration regardless of worker count,
chunking, or execution order.

Also hosts the two closed-form test oracles used to cross-check the
simulation: the expected full-knowledge score (threshold / rate, the mean
arrival step of the threshold-th alert) and the exact blind-attacker win
probability (a negative-binomial arrival tail).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from posbg import __version__
from posbg._kernels import run_fk_episodes, run_pk_episodes, run_zk_sessions
from posbg.agents import LifespanVariant, compute_lifespan, compute_threshold, joint_alert_rate
from posbg.engine import TieBreak
from posbg.rng import derive_seed, derive_seed_array

_CHUNK = 1 << 14  # trials processed per kernel call; caps block memory


class AttackerModelKind(Enum):
    FULL_KNOWLEDGE = "fk"
    PARTIAL_KNOWLEDGE = "pk"
    ZERO_KNOWLEDGE = "zk"


class ZkAggregate(Enum):
    """Which per-session statistic becomes a zero-knowledge cell's headline."""

    MEAN = "mean"
    MAX = "max"


# Canonical per-model offsets for cell indexing: a model's rows reproduce
# exactly whether it is swept alone or alongside the others.
_MODEL_OFFSET = {
    AttackerModelKind.FULL_KNOWLEDGE: 0,
    AttackerModelKind.PARTIAL_KNOWLEDGE: 1,
    AttackerModelKind.ZERO_KNOWLEDGE: 2,
}


@dataclass(frozen=True)
class GridSpec:
    """Evenly spaced parameter values, endpoints included."""

    min: float = 0.01
    max: float = 0.99
    points: int = 20

    def __post_init__(self) -> None:
        if not 0.0 <= self.min < self.max <= 1.0:
            raise ValueError("grid requires 0 <= min < max <= 1")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")


def make_grid(spec: GridSpec) -> list[float]:
    """The grid values ``min + k * (max - min) / (points - 1)``.

    The last value is pinned to ``max`` so accumulated float rounding cannot
    move the endpoint.
    """
    step = (spec.max - spec.min) / (spec.points - 1)
    values = [spec.min + k * step for k in range(spec.points)]
    values[-1] = spec.max
    return values


@dataclass(frozen=True)
class CellConfig:
    """Everything needed to run one (model, p, q) cell reproducibly."""

    p: float
    q: float
    model: AttackerModelKind
    trials: int
    attempts: int = 10
    lifespan_variant: LifespanVariant = LifespanVariant.EXACT_THRESHOLD
    master_seed: int = 0
    cell_index: int = 0
    tie_break: TieBreak = TieBreak.ATTACKER_WINS
    zk_aggregate: ZkAggregate = ZkAggregate.MEAN

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.attempts < 1:
            raise ValueError("attempts must be >= 1")


@dataclass(frozen=True)
class CellStats:
    """Aggregated outcomes of one cell.

    For zero-knowledge cells one "trial" is a whole learning session, so
    ``mean_score`` and ``win_rate`` average the per-session statistics and
    ``zk_mean_of_max`` carries the mean of per-session best attempts.
    ``threshold`` and ``lifespan`` record the deployed policy parameters.
    """

    mean_score: float
    win_rate: float
    max_score: int
    std_score: float
    trials: int
    threshold: int
    lifespan: Optional[int] = None
    zk_mean_of_max: Optional[float] = None


class RunningStats:
    """Streaming mean/variance accumulator (Welford, chunk-mergeable).

    Chunks are merged in a fixed order by the harness, so results are
    deterministic; the compensated update keeps long runs stable.
    """

    __slots__ = ("count", "mean", "_m2")

    def __init__(self) -> None:
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def push(self, value: float) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (value - self.mean)

    def push_array(self, values: np.ndarray) -> None:
        m = int(values.size)
        if m == 0:
            return
        mean_b = float(values.mean())
        m2_b = float(((values - mean_b) ** 2).sum())
        if self.count == 0:
            self.count, self.mean, self._m2 = m, mean_b, m2_b
            return
        n = self.count + m
        delta = mean_b - self.mean
        self.mean += delta * m / n
        self._m2 += m2_b + delta * delta * self.count * m / n
        self.count = n

    @property
    def variance(self) -> float:
        """Sample variance (ddof=1); 0.0 with fewer than two observations."""
        if self.count < 2:
            return 0.0
        return self._m2 / (self.count - 1)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def sem(self) -> float:
        """Standard error of the mean from the sample standard deviation."""
        if self.count == 0:
            return 0.0
        return self.std / math.sqrt(self.count)


def fk_expected_score(p: float, q: float) -> float:
    """Closed-form expected full-knowledge score: threshold / alert rate.

    The threshold-th alert of a per-step Bernoulli(rate) process arrives, in
    expectation, after threshold / rate steps, and the full-knowledge attacker
    banks exactly one infection per step until that arrival.
    """
    return compute_threshold(p, q) / joint_alert_rate(p, q)


def nb_arrival_tail(threshold: int, rate: float, lifespan: int) -> float:
    """P(the threshold-th alert arrives at or after step ``lifespan``).

    Equals the probability of fewer than ``threshold`` alerts in the first
    ``lifespan - 1`` steps of a Bernoulli(rate) process, summed exactly from
    the binomial mass.  This is the blind attacker's win probability when
    simultaneous stops favor the attacker.
    """
    if threshold < 1 or lifespan < 1:
        raise ValueError("threshold and lifespan must be >= 1")
    if not 0.0 < rate <= 1.0:
        raise ValueError("rate must be in (0, 1]")
    n = lifespan - 1
    if threshold > n:
        return 1.0  # not enough steps for that many alerts
    return float(
        sum(math.comb(n, j) * rate**j * (1.0 - rate) ** (n - j) for j in range(threshold))
    )


def run_cell(config: CellConfig) -> CellStats:
    """Run all trials of one cell and aggregate.

    Trials are chunked for memory, each chunk seeded independently by
    (master seed, cell index, trial index), so chunk size never affects
    results.  Degenerate cells (p = 0) are rejected by the threshold rule.
    """
    p, q = config.p, config.q
    model = config.model
    threshold = compute_threshold(p, q)
    lifespan: Optional[int] = None
    if model is AttackerModelKind.PARTIAL_KNOWLEDGE:
        lifespan = compute_lifespan(p, q, config.lifespan_variant)

    stats = RunningStats()
    wins_total = 0
    score_total = 0
    session_max_total = 0
    max_score = 0

    for start in range(0, config.trials, _CHUNK):
        count = min(_CHUNK, config.trials - start)
        indices = np.arange(start, start + count, dtype=np.uint64)
        seeds = derive_seed_array(config.master_seed, config.cell_index, indices)
        if model is AttackerModelKind.FULL_KNOWLEDGE:
            batch = run_fk_episodes(p, q, threshold, seeds, config.tie_break)
            stats.push_array(batch.score.astype(np.float64))
            wins_total += int(batch.won.sum())
            score_total += int(batch.score.sum())
            max_score = max(max_score, int(batch.score.max()))
        elif model is AttackerModelKind.PARTIAL_KNOWLEDGE:
            lifespans = np.full(count, lifespan, dtype=np.int64)
            batch = run_pk_episodes(p, q, threshold, lifespans, seeds, config.tie_break)
            stats.push_array(batch.score.astype(np.float64))
            wins_total += int(batch.won.sum())
            score_total += int(batch.score.sum())
            max_score = max(max_score, int(batch.score.max()))
        else:
            sessions = run_zk_sessions(p, q, threshold, seeds, config.attempts, config.tie_break)
            if config.zk_aggregate is ZkAggregate.MEAN:
                headline = sessions.score_sum / config.attempts
            else:
                headline = sessions.score_max.astype(np.float64)
            stats.push_array(headline)
            wins_total += int(sessions.wins.sum())
            score_total += int(sessions.score_sum.sum())
            session_max_total += int(sessions.score_max.sum())
            max_score = max(max_score, int(sessions.score_max.max()))

    zk_mean_of_max: Optional[float] = None
    if model is AttackerModelKind.ZERO_KNOWLEDGE:
        win_rate = wins_total / (config.trials * config.attempts)
        zk_mean_of_max = session_max_total / config.trials
        if config.zk_aggregate is ZkAggregate.MEAN:
            mean_score = score_total / (config.trials * config.attempts)
        else:
            mean_score = zk_mean_of_max
    elif model is AttackerModelKind.PARTIAL_KNOWLEDGE:
        win_rate = wins_total / config.trials
        # Wins score exactly the lifespan and losses zero, so the cell mean
        # is the lifespan times the win rate, bit for bit.
        mean_score = lifespan * win_rate
    else:
        win_rate = wins_total / config.trials
        mean_score = score_total / config.trials

    return CellStats(
        mean_score=mean_score,
        win_rate=win_rate,
        max_score=max_score,
        std_score=stats.std,
        trials=config.trials,
        threshold=threshold,
        lifespan=lifespan,
        zk_mean_of_max=zk_mean_of_max,
    )


def _run_cell_checked(config: CellConfig) -> CellStats:
    try:
        return run_cell(config)
    except Exception as exc:
        raise RuntimeError(
            f"cell failed (model={config.model.value}, p={config.p!r}, q={config.q!r}): {exc}"
        ) from exc


@dataclass(frozen=True)
class SweepReport:
    """Ordered cell results plus the provenance needed to reproduce them."""

    cells: tuple[tuple[CellConfig, CellStats], ...]
    provenance: dict

    def grand_mean(self, model: AttackerModelKind) -> float:
        """Unweighted mean of ``mean_score`` over the model's cells."""
        values = [stats.mean_score for cfg, stats in self.cells if cfg.model is model]
        if not values:
            raise ValueError(f"report has no cells for model {model.value!r}")
        return sum(values) / len(values)

    def mean_win_rate(self, model: AttackerModelKind) -> float:
        values = [stats.win_rate for cfg, stats in self.cells if cfg.model is model]
        if not values:
            raise ValueError(f"report has no cells for model {model.value!r}")
        return sum(values) / len(values)

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for cfg, stats in self.cells:
            lines.append(_csv_row(cfg, stats))
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())

    def to_json_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "cells": [
                {
                    "model": cfg.model.value,
                    "p": cfg.p,
                    "q": cfg.q,
                    "trials": stats.trials,
                    "threshold": stats.threshold,
                    "lifespan": stats.lifespan,
                    "mean_score": stats.mean_score,
                    "win_rate": stats.win_rate,
                    "max_score": stats.max_score,
                    "std_score": stats.std_score,
                    "zk_mean_of_max": stats.zk_mean_of_max,
                    "seed": cfg.master_seed,
                }
                for cfg, stats in self.cells
            ],
        }

    def write_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")


CSV_HEADER = (
    "model,p,q,trials,threshold,lifespan,mean_score,win_rate,"
    "max_score,std_score,zk_mean_of_max,seed"
)


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def _csv_row(cfg: CellConfig, stats: CellStats) -> str:
    lifespan = "" if stats.lifespan is None else str(stats.lifespan)
    zk_max = "" if stats.zk_mean_of_max is None else _fmt(stats.zk_mean_of_max)
    return ",".join(
        [
            cfg.model.value,
            _fmt(cfg.p),
            _fmt(cfg.q),
            str(stats.trials),
            str(stats.threshold),
            lifespan,
            _fmt(stats.mean_score),
            _fmt(stats.win_rate),
            str(stats.max_score),
            _fmt(stats.std_score),
            zk_max,
            str(cfg.master_seed),
        ]
    )


def run_sweep(
    grid: GridSpec,
    models: Sequence[AttackerModelKind],
    trials: int,
    master_seed: int = 0,
    lifespan_variant: LifespanVariant = LifespanVariant.EXACT_THRESHOLD,
    attempts: int = 10,
    tie_break: TieBreak = TieBreak.ATTACKER_WINS,
    zk_aggregate: ZkAggregate = ZkAggregate.MEAN,
    jobs: int = 1,
) -> SweepReport:
    """Run the full grid x model product of cells, in deterministic order.

    Rows are emitted model by model (in the requested order), then p-major
    over the grid.  Cell seeding uses canonical per-model offsets, so the
    same master seed reproduces identical rows whether a model is swept alone
    or with the others, and for any ``jobs`` count.
    """
    if not models:
        raise ValueError("at least one attacker model is required")
    if len(set(models)) != len(models):
        raise ValueError("duplicate attacker models requested")
    values = make_grid(grid)
    configs = []
    for model in models:
        offset = _MODEL_OFFSET[model] * grid.points * grid.points
        for i, p in enumerate(values):
            for j, q in enumerate(values):
                configs.append(
                    CellConfig(
                        p=p,
                        q=q,
                        model=model,
                        trials=trials,
                        attempts=attempts,
                        lifespan_variant=lifespan_variant,
                        master_seed=master_seed,
                        cell_index=offset + i * grid.points + j,
                        tie_break=tie_break,
                        zk_aggregate=zk_aggregate,
                    )
                )
    if jobs <= 1:
        results = [_run_cell_checked(cfg) for cfg in configs]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell_checked, configs))
    provenance = {
        "version": __version__,
        "master_seed": master_seed,
        "grid": {"min": grid.min, "max": grid.max, "points": grid.points},
        "models": [m.value for m in models],
        "trials": trials,
        "attempts": attempts,
        "lifespan_variant": lifespan_variant.value,
        "tie_break": tie_break.value,
        "zk_aggregate": zk_aggregate.value,
    }
    return SweepReport(cells=tuple(zip(configs, results)), provenance=provenance)


__all__ = [
    "AttackerModelKind",
    "CSV_HEADER",
    "CellConfig",
    "CellStats",
    "GridSpec",
    "RunningStats",
    "SweepReport",
    "ZkAggregate",
    "derive_seed",
    "fk_expected_score",
    "make_grid",
    "nb_arrival_tail",
    "run_cell",
    "run_sweep",
]
