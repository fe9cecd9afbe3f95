"""Defender and attacker decision rules.

The defender commits, before play, to an alert count at which it shuts the
game down.  Attackers differ in what they can observe:

* full knowledge -- sees the alert count and the environment rates, so it can
  mirror the defender's trigger and stop on the same step;
* partial knowledge -- knows the rates but not the alert count, so it plans a
  fixed number of actions (a "lifespan") from the expected alert arrival
  process and stops blind;
* zero knowledge -- knows neither, and learns an alert-rate estimate across a
  small budget of repeated attempts with a conjugate Beta model, re-planning
  a lifespan before each attempt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar

from posbg.engine import (
    AttackerAction,
    DefenderAction,
    EpisodeResult,
    GameParams,
    GameState,
    run_episode,
)
from posbg.rng import RandomSource


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value!r}")


def joint_alert_rate(p: float, q: float) -> float:
    """Per-step probability that at least one alert fires while acting.

    Complement of both independent channels staying quiet:
    ``1 - (1-p)(1-q) = p + q - p*q``.
    """
    _check_probability("p", p)
    _check_probability("q", q)
    return p + q - p * q


def compute_threshold(p: float, q: float) -> int:
    """Alert count at which a rational defender shuts the game down.

    The expected number of acting steps until the first true-positive alert
    is ceil(1/p); multiplying by the joint per-step alert rate gives the
    expected number of alerts accumulated by then, floored to the minimal
    integer trigger.  Requires ``p > 0``: with no true-positive channel there
    is nothing to detect.
    """
    _check_probability("p", p)
    if p == 0.0:
        raise ValueError("degenerate detection: p must be positive to choose a threshold")
    threshold = math.floor(math.ceil(1.0 / p) * joint_alert_rate(p, q))
    # Exact value is >= 1 (ceil(1/p)*r >= r/p >= 1); float rounding can dip
    # just below 1 at p == 1, so clamp to the provable minimum.
    return max(1, threshold)


class LifespanVariant(Enum):
    """How the blind attacker turns the alert process into an action budget.

    EXACT_THRESHOLD uses the integer threshold the defender actually deploys;
    CLOSED_FORM substitutes the pre-floor approximation of the threshold,
    which cancels the rate and leaves ``(1 - r) / p``.
    """

    EXACT_THRESHOLD = "exact"
    CLOSED_FORM = "closed-form"


def compute_lifespan(
    p: float, q: float, variant: LifespanVariant = LifespanVariant.EXACT_THRESHOLD
) -> int:
    """Number of actions a blind attacker plans before self-stopping.

    Both variants floor the expected number of alert-free acting steps before
    the threshold-th alert (the mean of the negative-binomial failure count).
    The result is clamped to at least one action: a zero-action attacker
    scores nothing with certainty, while a single action has positive
    expected score under attacker-favored ties.
    """
    r = joint_alert_rate(p, q)
    if p == 0.0:
        raise ValueError("degenerate detection: p must be positive to plan a lifespan")
    if variant is LifespanVariant.EXACT_THRESHOLD:
        raw = math.floor(compute_threshold(p, q) * (1.0 - r) / r)
    elif variant is LifespanVariant.CLOSED_FORM:
        raw = math.floor((1.0 - r) / p)
    else:  # pragma: no cover - exhaustive enum
        raise ValueError(f"unknown lifespan variant: {variant!r}")
    return max(1, raw)


def defender_act(threshold: int, alerts: int) -> DefenderAction:
    """End once the alert count reaches the threshold, otherwise pass.

    Uses >= rather than == as a safety net; with one alert per step equality
    is the only reachable trigger.
    """
    return DefenderAction.END if alerts >= threshold else DefenderAction.PASS


def fk_attacker_act(threshold: int, alerts: int) -> AttackerAction:
    """Mirror the defender's trigger: stop at the threshold, else infect."""
    return AttackerAction.END if alerts >= threshold else AttackerAction.INFECT


def pk_attacker_act(lifespan: int, infections: int) -> AttackerAction:
    """Infect until the planned action budget is spent, then stop."""
    return AttackerAction.INFECT if infections < lifespan else AttackerAction.END


@dataclass(frozen=True)
class ThresholdDefender:
    """Defender that passes until the alert count reaches its threshold."""

    threshold: int

    def __post_init__(self) -> None:
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")

    @classmethod
    def for_rates(cls, p: float, q: float) -> "ThresholdDefender":
        return cls(compute_threshold(p, q))

    def act(self, alerts: int) -> DefenderAction:
        return defender_act(self.threshold, alerts)


@dataclass(frozen=True)
class FullKnowledgeAttacker:
    """Observes the alert count; stops on the defender's own trigger step."""

    threshold: int
    self_stopping: ClassVar[bool] = False

    def act(self, state: GameState) -> AttackerAction:
        return fk_attacker_act(self.threshold, state.alerts)


@dataclass(frozen=True)
class PartialKnowledgeAttacker:
    """Cannot observe alerts; acts a planned number of times, then stops."""

    lifespan: int
    self_stopping: ClassVar[bool] = True

    def __post_init__(self) -> None:
        if self.lifespan < 1:
            raise ValueError("lifespan must be >= 1")

    def act(self, state: GameState) -> AttackerAction:
        return pk_attacker_act(self.lifespan, state.infections)


@dataclass(frozen=True)
class PartialKnowledgePlan:
    """A blind attacker's action budget and the rule that produced it."""

    lifespan: int
    variant: LifespanVariant


@dataclass(frozen=True)
class BetaPosterior:
    """Conjugate Beta belief over the per-step alert rate."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise ValueError("Beta parameters must be positive")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


def zk_plan(posterior: BetaPosterior) -> PartialKnowledgePlan:
    """Plan the next attempt's lifespan from the current rate belief.

    The learner only ever sees (win/loss, steps survived), which cannot
    separate the true-positive rate from the ambient rate, so it attributes
    every alert to its own actions: the posterior mean becomes the acting-step
    rate estimate and the ambient rate is taken as zero.
    """
    rate_estimate = posterior.mean
    lifespan = compute_lifespan(rate_estimate, 0.0, LifespanVariant.EXACT_THRESHOLD)
    return PartialKnowledgePlan(lifespan=lifespan, variant=LifespanVariant.EXACT_THRESHOLD)


def zk_update(
    posterior: BetaPosterior, outcome: EpisodeResult, planned_threshold: int
) -> BetaPosterior:
    """Pseudo-count update from one attempt's censored feedback.

    The learner never sees alerts, only the outcome and the steps survived.
    A loss means the defender's trigger was reached on the last step, so the
    planned threshold estimate is credited as alert pseudo-counts and the
    remaining steps as quiet ones.  A win means the trigger was never reached
    while acting: at most ``planned_threshold - 1`` alerts over the whole run.
    Increments are clamped at zero so the posterior stays valid.
    """
    if outcome.attacker_won:
        hits = max(planned_threshold - 1, 0)
        misses = max(outcome.duration - hits, 0)
    else:
        hits = planned_threshold
        misses = max(outcome.duration - planned_threshold, 0)
    return BetaPosterior(posterior.alpha + hits, posterior.beta + misses)


@dataclass(frozen=True)
class ZkSessionResult:
    """Aggregate outcome of one learning session (a budget of attempts)."""

    max_score: int
    mean_score: float
    win_rate: float
    attempts: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.win_rate <= 1.0:
            raise ValueError("win_rate must be in [0, 1]")
        if self.max_score < self.mean_score:
            raise ValueError("max_score cannot be below mean_score")


def run_zk_session(
    params: GameParams,
    defender: ThresholdDefender,
    attempts: int = 10,
    rng: RandomSource | None = None,
) -> ZkSessionResult:
    """Run one zero-knowledge learning session against a fixed defender.

    Starts from a uniform Beta(1, 1) belief; before each attempt plans a
    lifespan from the current posterior, after each attempt updates the
    posterior from the censored outcome.  Reports the maximum score, mean
    score, and win rate across the attempts.
    """
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    if rng is None:
        raise ValueError("run_zk_session requires a RandomSource")
    if joint_alert_rate(params.p, params.q) == 0.0:
        raise ValueError("degenerate configuration: joint alert rate is 0")
    posterior = BetaPosterior()
    scores: list[int] = []
    wins = 0
    for _ in range(attempts):
        planned_threshold = compute_threshold(posterior.mean, 0.0)
        plan = zk_plan(posterior)
        attacker = PartialKnowledgeAttacker(plan.lifespan)
        outcome = run_episode(attacker, defender, params, rng)
        scores.append(outcome.score)
        wins += 1 if outcome.attacker_won else 0
        posterior = zk_update(posterior, outcome, planned_threshold)
    return ZkSessionResult(
        max_score=max(scores),
        mean_score=sum(scores) / attempts,
        win_rate=wins / attempts,
        attempts=attempts,
    )
