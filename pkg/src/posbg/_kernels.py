"""Vectorized Monte Carlo kernels for the sweep harness.

Each trial's randomness is a counter-based stream (see :mod:`posbg.rng`), so
the kernels draw whole blocks of steps at once, discard unused tail draws,
and still agree bit-for-bit with the scalar engine walking the same streams
one draw at a time (covered by tests).  All planning arithmetic mirrors the
scalar formulas operation for operation so that rounding matches exactly.

Conventions shared with the engine: each acting step consumes two draws
(true-positive channel, then ambient); the final End step consumes none; a
RANDOM tie-break consumes one extra draw at episode end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from posbg.engine import TieBreak
from posbg.rng import uniform_block

_BLOCK = 64


@dataclass(frozen=True)
class EpisodeBatch:
    """Per-trial episode outcomes, plus the draws each episode consumed."""

    won: np.ndarray  # bool
    score: np.ndarray  # int64
    duration: np.ndarray  # int64
    draws: np.ndarray  # uint64


def _threshold_arrival(
    p: float,
    q: float,
    threshold: int,
    seeds: np.ndarray,
    bases: np.ndarray,
    limit: np.ndarray | None,
) -> np.ndarray:
    """Step index at which cumulative alerts reach ``threshold`` per trial.

    Walks each trial's stream from draw index ``bases[i]``, two draws per
    step.  Trials that do not reach the threshold within their ``limit``
    steps return ``limit + 1``; with ``limit=None`` the walk continues until
    arrival (requires a positive alert rate).
    """
    n = seeds.size
    arrival = np.zeros(n, dtype=np.int64)
    stepped = np.zeros(n, dtype=np.int64)
    alerts = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        if limit is None:
            block = _BLOCK
        else:
            remaining = limit[active] - stepped[active]
            exhausted = remaining <= 0
            if np.any(exhausted):
                done_idx = active[exhausted]
                arrival[done_idx] = limit[done_idx] + 1
                active = active[~exhausted]
                if not active.size:
                    break
                remaining = limit[active] - stepped[active]
            block = int(min(_BLOCK, remaining.max()))
        draws = uniform_block(
            seeds[active],
            bases[active] + (2 * stepped[active]).astype(np.uint64),
            2 * block,
        )
        alert = (draws[:, 0::2] < p) | (draws[:, 1::2] < q)
        cum = alerts[active][:, None] + np.cumsum(alert, axis=1)
        reached = cum >= threshold
        hit = reached[:, -1]
        first = np.argmax(reached, axis=1)
        if limit is not None:
            # A hit only counts if it lands within the trial's own limit.
            within = first < np.minimum(limit[active] - stepped[active], block)
            hit = hit & within
        hit_idx = active[hit]
        arrival[hit_idx] = stepped[hit_idx] + first[hit] + 1
        keep = ~hit
        keep_idx = active[keep]
        alerts[keep_idx] = cum[keep, -1]
        stepped[keep_idx] += block
        active = keep_idx
    return arrival


def _resolve_tie(
    tie_break: TieBreak,
    seeds: np.ndarray,
    bases: np.ndarray,
    tie_mask: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Attacker-won flags for tied episodes plus per-trial extra draw counts."""
    n = seeds.size
    extra = np.zeros(n, dtype=np.uint64)
    if tie_break is TieBreak.ATTACKER_WINS:
        won = tie_mask.copy()
    elif tie_break is TieBreak.DEFENDER_WINS:
        won = np.zeros(n, dtype=bool)
    else:
        won = np.zeros(n, dtype=bool)
        if np.any(tie_mask):
            coins = uniform_block(seeds[tie_mask], bases[tie_mask], 1)[:, 0]
            won[tie_mask] = coins < 0.5
        extra[tie_mask] = 1
    return won, extra


def run_fk_episodes(
    p: float, q: float, threshold: int, seeds: np.ndarray, tie_break: TieBreak
) -> EpisodeBatch:
    """Full-knowledge episodes: both players stop on the threshold step.

    Every episode ends in a tie at the arrival step of the threshold-th
    alert, so the outcome is the arrival step resolved by the tie rule.
    """
    bases = np.zeros(seeds.size, dtype=np.uint64)
    arrival = _threshold_arrival(p, q, threshold, seeds, bases, limit=None)
    duration = arrival
    tie_bases = bases + (2 * duration).astype(np.uint64)
    won, extra = _resolve_tie(tie_break, seeds, tie_bases, np.ones(seeds.size, dtype=bool))
    score = np.where(won, arrival, 0).astype(np.int64)
    return EpisodeBatch(won, score, duration, (2 * duration).astype(np.uint64) + extra)


def run_pk_episodes(
    p: float,
    q: float,
    threshold: int,
    lifespan: np.ndarray,
    seeds: np.ndarray,
    tie_break: TieBreak,
    bases: np.ndarray | None = None,
) -> EpisodeBatch:
    """Blind fixed-lifespan episodes; ``lifespan`` may vary per trial.

    The attacker survives iff the threshold-th alert has not arrived strictly
    before its stopping step; arrival exactly on the stopping step is a tie.
    """
    n = seeds.size
    if bases is None:
        bases = np.zeros(n, dtype=np.uint64)
    arrival = _threshold_arrival(p, q, threshold, seeds, bases, limit=lifespan)
    duration = np.minimum(arrival, lifespan)
    tie = arrival == lifespan
    outright_win = arrival > lifespan
    tie_bases = bases + (2 * duration).astype(np.uint64)
    tie_won, extra = _resolve_tie(tie_break, seeds, tie_bases, tie)
    won = outright_win | tie_won
    score = np.where(won, lifespan, 0).astype(np.int64)
    return EpisodeBatch(won, score, duration, (2 * duration).astype(np.uint64) + extra)


@dataclass(frozen=True)
class ZkSessionBatch:
    """Per-session aggregates over a fixed budget of learning attempts.

    Sums are kept as exact integers; callers derive means and rates so that
    aggregation order can never perturb the results.
    """

    wins: np.ndarray  # int64, attempt wins per session
    score_sum: np.ndarray  # int64, total score per session
    score_max: np.ndarray  # int64, best single attempt per session


def run_zk_sessions(
    p: float,
    q: float,
    threshold: int,
    seeds: np.ndarray,
    attempts: int,
    tie_break: TieBreak,
) -> ZkSessionBatch:
    """Zero-knowledge learning sessions, vectorized across sessions.

    Each session consumes one stream: attempts run sequentially, with the
    Beta posterior planning arithmetic written exactly like the scalar agent
    code so both paths round identically.
    """
    n = seeds.size
    alpha = np.ones(n)
    beta = np.ones(n)
    counters = np.zeros(n, dtype=np.uint64)
    wins = np.zeros(n, dtype=np.int64)
    score_sum = np.zeros(n, dtype=np.int64)
    score_max = np.zeros(n, dtype=np.int64)
    for _ in range(attempts):
        rate_est = alpha / (alpha + beta)
        th_hat = np.maximum(1.0, np.floor(np.ceil(1.0 / rate_est) * rate_est))
        lifespan = np.maximum(1.0, np.floor(th_hat * (1.0 - rate_est) / rate_est)).astype(np.int64)
        batch = run_pk_episodes(p, q, threshold, lifespan, seeds, tie_break, bases=counters)
        counters = counters + batch.draws
        wins += batch.won
        score_sum += batch.score
        score_max = np.maximum(score_max, batch.score)
        th_int = th_hat.astype(np.int64)
        hits = np.where(batch.won, np.maximum(th_int - 1, 0), th_int)
        misses = np.maximum(batch.duration - hits, 0)
        alpha = alpha + hits
        beta = beta + misses
    return ZkSessionBatch(wins=wins, score_sum=score_sum, score_max=score_max)
