"""Turn-based attacker/defender game with a noisy alert channel.

Both players move simultaneously each step.  While the attacker keeps
infecting and the defender keeps passing, one infection lands per step and an
alert may fire: the true-positive channel fires with probability ``p`` only on
steps where the attacker acts, the ambient channel with probability ``q`` on
any step, and at most one alert is counted per step.  The episode ends on the
first step in which either player plays End.  An attacker who stops first (or
ties, under the attacker-favored rule) banks one point per infected node; an
attacker caught still acting scores zero.

Step anatomy (one call to :func:`step`):

1. both actions are chosen on the pre-step state,
2. if either action is End the episode resolves immediately with no alert
   roll for that step,
3. otherwise the infection count increments, the alert channels are rolled
   (always two draws, keeping stream positions schedule-independent), and the
   alert count increments if either channel fired.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, Union

from posbg.rng import RandomSource


class AttackerAction(Enum):
    INFECT = "infect"
    END = "end"


class DefenderAction(Enum):
    PASS = "pass"
    END = "end"


class TieBreak(Enum):
    """Resolution rule when both players End on the same step."""

    ATTACKER_WINS = "attacker"
    DEFENDER_WINS = "defender"
    RANDOM = "random"


class EndedBy(Enum):
    ATTACKER = "attacker"
    DEFENDER = "defender"
    TIE = "tie"


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value!r}")


@dataclass(frozen=True)
class GameParams:
    """Environment parameters.

    Attributes:
        p: probability the true-positive alert channel fires in a step where
           the attacker acts (rolled only on acting steps).
        q: probability the ambient alert channel fires in any step.
        tie_break: resolution when both players End simultaneously.
    """

    p: float
    q: float
    tie_break: TieBreak = TieBreak.ATTACKER_WINS

    def __post_init__(self) -> None:
        _check_probability("p", self.p)
        _check_probability("q", self.q)

    @property
    def alert_rate(self) -> float:
        """Per-step probability of at least one alert while the attacker acts."""
        return self.p + self.q - self.p * self.q


@dataclass(frozen=True)
class GameState:
    """Observable counters after ``steps`` completed steps.

    ``alerts`` and ``infections`` are nondecreasing and each gains at most one
    per step, so both are bounded by ``steps``.
    """

    alerts: int = 0
    infections: int = 0
    steps: int = 0

    def __post_init__(self) -> None:
        if min(self.alerts, self.infections, self.steps) < 0:
            raise ValueError("counters must be nonnegative")
        if self.alerts > self.steps or self.infections > self.steps:
            raise ValueError("at most one alert and one infection per step")


@dataclass(frozen=True)
class EpisodeResult:
    """Terminal outcome of one episode.

    ``score`` is the number of infected nodes if the attacker stopped in time
    (stopped first, or tied under an attacker-favored rule), otherwise 0.
    ``duration`` counts completed steps; the final End step is not one.
    """

    attacker_won: bool
    score: int
    duration: int
    ended_by: EndedBy


@dataclass(frozen=True)
class TraceRow:
    """One line of an episode trace: the record for a single step."""

    step: int
    attacker: AttackerAction
    defender: DefenderAction
    alert: int
    alerts: int
    infections: int

    def format(self) -> str:
        return (
            f"{self.step},{self.attacker.value},{self.defender.value},"
            f"{self.alert},{self.alerts},{self.infections}"
        )


class AttackerPolicy(Protocol):
    """Per-step decision rule; sees only what its knowledge model allows."""

    self_stopping: bool

    def act(self, state: GameState) -> AttackerAction: ...


class DefenderPolicy(Protocol):
    """Per-step decision rule; observes only the alert count."""

    def act(self, alerts: int) -> DefenderAction: ...


def draw_alert(params: GameParams, attacker_acted: bool, rng: RandomSource) -> bool:
    """Roll the alert channels for one step.

    Consumes exactly two draws when the attacker acted (true-positive channel
    first, then ambient) and one otherwise, so stream positions never depend
    on which branch fired.
    """
    if attacker_acted:
        true_positive = rng.uniform() < params.p
        ambient = rng.uniform() < params.q
        return true_positive or ambient
    return rng.uniform() < params.q


def resolve_end(
    a_att: AttackerAction,
    a_def: DefenderAction,
    state: GameState,
    tie_break: TieBreak = TieBreak.ATTACKER_WINS,
    rng: Optional[RandomSource] = None,
) -> EpisodeResult:
    """Resolve an episode in which at least one player played End.

    An attacker-only End wins and scores the infection count; a defender-only
    End zeroes the attacker out.  A simultaneous End is a tie resolved by
    ``tie_break``; the RANDOM rule consumes one draw from ``rng``.
    """
    att_end = a_att is AttackerAction.END
    def_end = a_def is DefenderAction.END
    if not (att_end or def_end):
        raise ValueError("resolve_end requires at least one End action")
    if att_end and def_end:
        ended_by = EndedBy.TIE
        if tie_break is TieBreak.ATTACKER_WINS:
            attacker_won = True
        elif tie_break is TieBreak.DEFENDER_WINS:
            attacker_won = False
        else:
            if rng is None:
                raise ValueError("RANDOM tie-break requires a RandomSource")
            attacker_won = rng.uniform() < 0.5
    elif att_end:
        ended_by = EndedBy.ATTACKER
        attacker_won = True
    else:
        ended_by = EndedBy.DEFENDER
        attacker_won = False
    return EpisodeResult(
        attacker_won=attacker_won,
        score=state.infections if attacker_won else 0,
        duration=state.steps,
        ended_by=ended_by,
    )


def step(
    state: GameState,
    a_att: AttackerAction,
    a_def: DefenderAction,
    params: GameParams,
    rng: RandomSource,
) -> Union[GameState, EpisodeResult]:
    """Advance the game by one simultaneous move.

    Returns the successor state, or an :class:`EpisodeResult` if either
    action was End (in which case no alert is rolled for the step).
    """
    if a_att is AttackerAction.END or a_def is DefenderAction.END:
        return resolve_end(a_att, a_def, state, params.tie_break, rng)
    infections = state.infections + 1
    alert = draw_alert(params, attacker_acted=True, rng=rng)
    return GameState(
        alerts=state.alerts + (1 if alert else 0),
        infections=infections,
        steps=state.steps + 1,
    )


def run_episode(
    attacker: AttackerPolicy,
    defender: DefenderPolicy,
    params: GameParams,
    rng: RandomSource,
    trace: Optional[list[TraceRow]] = None,
) -> EpisodeResult:
    """Play one episode from the empty state to termination.

    Policies are queried simultaneously on the pre-step state, each seeing
    only its own observables (the defender the alert count, the attacker
    whatever its knowledge model exposes).  Terminates with probability 1
    whenever the joint alert rate is positive or the attacker self-stops;
    the remaining configuration can never end and is rejected up front.
    """
    if params.alert_rate == 0.0 and not attacker.self_stopping:
        raise ValueError(
            "diverging configuration: joint alert rate is 0 and the attacker never self-stops"
        )
    state = GameState()
    while True:
        a_def = defender.act(state.alerts)
        a_att = attacker.act(state)
        outcome = step(state, a_att, a_def, params, rng)
        if isinstance(outcome, EpisodeResult):
            if trace is not None:
                trace.append(
                    TraceRow(state.steps + 1, a_att, a_def, 0, state.alerts, state.infections)
                )
            return outcome
        if trace is not None:
            trace.append(
                TraceRow(
                    outcome.steps,
                    a_att,
                    a_def,
                    outcome.alerts - state.alerts,
                    outcome.alerts,
                    outcome.infections,
                )
            )
        state = outcome
