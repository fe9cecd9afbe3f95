"""Exact expected-payoff evaluation for small stochastic games with hidden
opponent types.

A :class:`FiniteSBG` couples a finite state machine (states, joint-action
transition kernel, per-player utilities) with a set of behavioral "types" per
player, a per-type strategy table, and a prior over joint type profiles.  A
player knows its own type but not the opponents'; it maintains a Bayes
posterior over opponent type profiles from the observed joint actions and
scores each of its own actions by exhaustive expansion of the game tree to a
fixed horizon, discounting future payoffs and assuming it will keep playing a
best response along the way.

Everything here is exact (up to float arithmetic): no sampling, no
approximation beyond the horizon truncation, whose error is bounded by
``gamma**horizon * u_max / (1 - gamma)``.  Intended for games small enough to
enumerate; the evaluator is deliberately brute force.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

_SUM_TOL = 1e-9
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class History:
    """Alternating state/joint-action record ``<s0, a0, s1, ..., st>``.

    ``states`` has exactly one more entry than ``joint_actions``; the first
    state must be the game's initial state (checked by the evaluator).
    """

    states: tuple[int, ...]
    joint_actions: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        if len(self.states) != len(self.joint_actions) + 1:
            raise ValueError(
                "history needs exactly one more state than joint actions "
                f"(got {len(self.states)} states, {len(self.joint_actions)} actions)"
            )

    @property
    def last_state(self) -> int:
        return self.states[-1]

    @property
    def steps(self) -> int:
        return len(self.joint_actions)

    def extend(self, joint_action: tuple[int, ...], next_state: int) -> "History":
        """The projected history with one more joint action and state."""
        return History(
            states=self.states + (next_state,),
            joint_actions=self.joint_actions + (joint_action,),
        )


@dataclass(frozen=True)
class TypePosterior:
    """Distribution over the opponents' joint type profiles.

    ``opponents`` lists the player indices the profiles refer to, in player
    order; ``profiles[k]`` gives one type per opponent in that order.
    """

    opponents: tuple[int, ...]
    profiles: tuple[tuple[int, ...], ...]
    probs: tuple[float, ...]

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], float]]:
        return iter(zip(self.profiles, self.probs))

    def prob(self, profile: tuple[int, ...]) -> float:
        return self.probs[self.profiles.index(profile)]

    def marginal(self, player: int) -> np.ndarray:
        """Marginal distribution over one opponent's types."""
        pos = self.opponents.index(player)
        n = max(pf[pos] for pf in self.profiles) + 1
        out = np.zeros(n)
        for pf, pr in self:
            out[pf[pos]] += pr
        return out


@dataclass(frozen=True, eq=False)
class FiniteSBG:
    """A fully specified small stochastic game with hidden opponent types.

    Attributes:
        n_states: number of states; states are integer indices.
        initial_state: index of the start state.
        terminal: indices of absorbing states (no transitions evaluated).
        n_actions: per-player action counts.
        n_types: per-player type counts.
        transition: array ``(S, JA, S)`` of next-state probabilities, with
            joint actions flattened row-major over players.
        utilities: array ``(N, S, JA, S)`` of per-player payoffs.
        strategies: per player, an array ``(types_j, S, actions_j)`` giving
            the probability that type plays each action in each state.
        type_prior: array with one axis per player over that player's types.
        gamma: discount factor in [0, 1).
        horizon: maximum number of joint actions expanded in the lookahead.
        state_labels / action_labels / type_labels / player_labels: optional
            names used by the JSON loader and for display.
    """

    n_states: int
    initial_state: int
    terminal: frozenset[int]
    n_actions: tuple[int, ...]
    n_types: tuple[int, ...]
    transition: np.ndarray
    utilities: np.ndarray
    strategies: tuple[np.ndarray, ...]
    type_prior: np.ndarray
    gamma: float
    horizon: int
    state_labels: Optional[tuple[str, ...]] = None
    player_labels: Optional[tuple[str, ...]] = None
    action_labels: Optional[tuple[tuple[str, ...], ...]] = None
    type_labels: Optional[tuple[tuple[str, ...], ...]] = None

    def __post_init__(self) -> None:
        self.validate()

    @property
    def n_players(self) -> int:
        return len(self.n_actions)

    @property
    def n_joint_actions(self) -> int:
        n = 1
        for a in self.n_actions:
            n *= a
        return n

    def joint_index(self, joint_action: Sequence[int]) -> int:
        """Row-major flat index of a joint action tuple."""
        if len(joint_action) != self.n_players:
            raise ValueError("joint action must name one action per player")
        idx = 0
        for a, n in zip(joint_action, self.n_actions):
            if not 0 <= a < n:
                raise ValueError(f"action index {a} out of range (0..{n - 1})")
            idx = idx * n + a
        return idx

    def joint_actions(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(n) for n in self.n_actions))

    def strategy_prob(self, player: int, history: History, action: int, type_idx: int) -> float:
        """Probability that the given type of ``player`` plays ``action``.

        Strategies are stationary tables conditioned on the current (last)
        state of the history.
        """
        return float(self.strategies[player][type_idx, history.last_state, action])

    def check_state(self, state: int) -> None:
        if not 0 <= state < self.n_states:
            raise ValueError(f"state index {state} out of range (0..{self.n_states - 1})")

    def validate(self) -> None:
        n = self.n_players
        if len(self.n_types) != n or len(self.strategies) != n:
            raise ValueError("per-player structures must agree on player count")
        self.check_state(self.initial_state)
        if self.transition.shape != (self.n_states, self.n_joint_actions, self.n_states):
            raise ValueError(f"transition must have shape (S, JA, S), got {self.transition.shape}")
        if self.utilities.shape != (n, self.n_states, self.n_joint_actions, self.n_states):
            raise ValueError(f"utilities must have shape (N, S, JA, S), got {self.utilities.shape}")
        if self.type_prior.shape != tuple(self.n_types):
            raise ValueError("type_prior must have one axis per player over its types")
        if np.any(self.type_prior < 0) or abs(float(self.type_prior.sum()) - 1.0) > _SUM_TOL:
            raise ValueError("type_prior must be a distribution (sum 1 within 1e-9)")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0, 1)")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        for s in range(self.n_states):
            if s in self.terminal:
                continue
            for ja in range(self.n_joint_actions):
                row = self.transition[s, ja]
                if np.any(row < 0) or abs(float(row.sum()) - 1.0) > _SUM_TOL:
                    raise ValueError(
                        f"transition row (state={s}, joint_action={ja}) must sum to 1 within 1e-9"
                    )
        for j in range(n):
            table = self.strategies[j]
            if table.shape != (self.n_types[j], self.n_states, self.n_actions[j]):
                raise ValueError(
                    f"strategy table for player {j} must have shape (types, S, actions)"
                )
            for t in range(self.n_types[j]):
                for s in range(self.n_states):
                    if s in self.terminal:
                        continue
                    row = table[t, s]
                    if np.any(row < 0) or abs(float(row.sum()) - 1.0) > _SUM_TOL:
                        raise ValueError(
                            f"strategy row (player={j}, type={t}, state={s}) "
                            "must sum to 1 within 1e-9"
                        )

    def validate_history(self, history: History) -> None:
        if history.states[0] != self.initial_state:
            raise ValueError("history must start at the initial state")
        for s in history.states:
            self.check_state(s)
        for a in history.joint_actions:
            self.joint_index(a)


def _opponents(game: FiniteSBG, player: int) -> tuple[int, ...]:
    return tuple(j for j in range(game.n_players) if j != player)


def type_posterior(game: FiniteSBG, history: History, player: int) -> TypePosterior:
    """Bayes posterior over opponent type profiles given the observed history.

    The prior is the joint type prior marginalized onto the opponents; the
    likelihood of a profile is the product, over history steps and opponents,
    of the probability that profile assigned to the action actually observed.
    If every profile has zero likelihood the prior is returned and a warning
    is issued.
    """
    game.validate_history(history)
    opponents = _opponents(game, player)
    prior = np.sum(game.type_prior, axis=player) if game.n_players > 1 else np.array(1.0)
    profiles = tuple(itertools.product(*(range(game.n_types[j]) for j in opponents)))
    weights = []
    priors = []
    for profile in profiles:
        pr = float(prior[profile]) if opponents else 1.0
        w = pr
        for tau in range(history.steps):
            if w == 0.0:
                break
            prefix = History(history.states[: tau + 1], history.joint_actions[:tau])
            joint = history.joint_actions[tau]
            for pos, j in enumerate(opponents):
                w *= game.strategy_prob(j, prefix, joint[j], profile[pos])
        priors.append(pr)
        weights.append(w)
    total = sum(weights)
    if total == 0.0:
        warnings.warn(
            "observed history has zero likelihood under every type profile; "
            "falling back to the prior",
            RuntimeWarning,
            stacklevel=2,
        )
        weights = priors
        total = sum(weights)
    return TypePosterior(
        opponents=opponents,
        profiles=profiles,
        probs=tuple(w / total for w in weights),
    )


def q_value(
    game: FiniteSBG,
    player: int,
    state: int,
    joint_action: Sequence[int],
    history: History,
    depth: int = 0,
) -> float:
    """Expected discounted payoff of one joint action in ``state``.

    Sums over successor states: immediate utility plus, below the horizon and
    outside terminal states, the discounted value of continuing with a best
    response against the projected history.
    """
    game.check_state(state)
    if depth > game.horizon:
        raise ValueError("depth cannot exceed the horizon")
    if history.last_state != state:
        raise ValueError("history must end at the state being evaluated")
    ja = game.joint_index(joint_action)
    joint = tuple(joint_action)
    total = 0.0
    for nxt in range(game.n_states):
        t_prob = float(game.transition[state, ja, nxt])
        if t_prob == 0.0:
            continue
        value = float(game.utilities[player, state, ja, nxt])
        if game.gamma > 0.0 and nxt not in game.terminal and depth + 1 < game.horizon:
            projected = history.extend(joint, nxt)
            value += game.gamma * max(
                expected_payoff(game, player, nxt, a, projected, depth + 1)
                for a in range(game.n_actions[player])
            )
        total += t_prob * value
    return total


def expected_payoff(
    game: FiniteSBG,
    player: int,
    state: int,
    action: int,
    history: History,
    depth: int = 0,
) -> float:
    """Expected discounted payoff of ``player`` taking ``action`` in ``state``.

    Mixes :func:`q_value` over the opponents' actions (weighted by their
    per-type strategies at the current history) and over opponent type
    profiles (weighted by the Bayes posterior given that history).
    """
    game.check_state(state)
    if depth > game.horizon:
        raise ValueError("depth cannot exceed the horizon")
    if history.last_state != state:
        raise ValueError("history must end at the state being evaluated")
    if not 0 <= action < game.n_actions[player]:
        raise ValueError(f"action index {action} out of range for player {player}")
    if state in game.terminal or depth >= game.horizon:
        return 0.0
    posterior = type_posterior(game, history, player)
    opponents = posterior.opponents
    total = 0.0
    for profile, p_profile in posterior:
        if p_profile == 0.0:
            continue
        for opp_actions in itertools.product(*(range(game.n_actions[j]) for j in opponents)):
            weight = p_profile
            for pos, j in enumerate(opponents):
                weight *= game.strategy_prob(j, history, opp_actions[pos], profile[pos])
                if weight == 0.0:
                    break
            if weight == 0.0:
                continue
            joint = _assemble_joint(game, player, action, opponents, opp_actions)
            total += weight * q_value(game, player, state, joint, history, depth)
    return total


def _assemble_joint(
    game: FiniteSBG,
    player: int,
    action: int,
    opponents: tuple[int, ...],
    opp_actions: tuple[int, ...],
) -> tuple[int, ...]:
    joint = [0] * game.n_players
    joint[player] = action
    for pos, j in enumerate(opponents):
        joint[j] = opp_actions[pos]
    return tuple(joint)


def hba_action(game: FiniteSBG, player: int, state: int, history: History) -> int:
    """Best-response action: maximal expected payoff, lowest index on ties.

    Actions whose payoff is within 1e-9 of the maximum count as tied, and the
    lowest such index is returned, so the choice is deterministic.
    """
    game.check_state(state)
    if state in game.terminal:
        raise ValueError(f"state {state} is terminal; no action to choose")
    values = [
        expected_payoff(game, player, state, a, history) for a in range(game.n_actions[player])
    ]
    best = max(values)
    for a, v in enumerate(values):
        if v >= best - _TIE_TOL:
            return a
    raise AssertionError("unreachable")  # pragma: no cover


def action_values(game: FiniteSBG, player: int, state: int, history: History) -> list[float]:
    """Expected payoff of every action of ``player`` in ``state``."""
    game.check_state(state)
    return [
        expected_payoff(game, player, state, a, history) for a in range(game.n_actions[player])
    ]


# ---------------------------------------------------------------------------
# JSON game definitions
# ---------------------------------------------------------------------------


def load_game(source: Union[str, dict]) -> FiniteSBG:
    """Build a :class:`FiniteSBG` from a JSON file path or parsed dict.

    The document names states, players, per-player actions and types, lists
    transition rows as ``{"state", "action", "next": {state: prob}}``,
    utility entries as ``{"state", "action", "next", "payoff": [per player]}``
    (unlisted entries default to 0), and strategy rows as
    ``{"player", "type", "state", "probs": {action: prob}}``.  See the README
    for a complete example.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = source
    try:
        return _game_from_dict(doc)
    except KeyError as exc:
        raise ValueError(f"game definition is missing required field {exc}") from exc


def _index_of(label: str, labels: Sequence[str], kind: str) -> int:
    try:
        return labels.index(label)
    except ValueError:
        raise ValueError(f"unknown {kind} {label!r} (expected one of {list(labels)})") from None


def _game_from_dict(doc: dict) -> FiniteSBG:
    states: list[str] = list(doc["states"])
    players: list[str] = list(doc["players"])
    actions: list[list[str]] = [list(a) for a in doc["actions"]]
    types: list[list[str]] = [list(t) for t in doc["types"]]
    if len(actions) != len(players) or len(types) != len(players):
        raise ValueError("actions and types must list one array per player")

    n_states = len(states)
    n_players = len(players)
    n_actions = tuple(len(a) for a in actions)
    n_types = tuple(len(t) for t in types)
    n_joint = 1
    for a in n_actions:
        n_joint *= a

    initial = _index_of(doc["initial_state"], states, "state")
    terminal = frozenset(_index_of(s, states, "state") for s in doc.get("terminal_states", []))

    def joint_of(action_labels: Sequence[str]) -> int:
        if len(action_labels) != n_players:
            raise ValueError(f"joint action {action_labels!r} must name one action per player")
        idx = 0
        for j, lbl in enumerate(action_labels):
            idx = idx * n_actions[j] + _index_of(lbl, actions[j], f"action of {players[j]}")
        return idx

    transition = np.zeros((n_states, n_joint, n_states))
    for row in doc["transitions"]:
        s = _index_of(row["state"], states, "state")
        ja = joint_of(row["action"])
        for nxt_label, prob in row["next"].items():
            transition[s, ja, _index_of(nxt_label, states, "state")] = float(prob)

    utilities = np.zeros((n_players, n_states, n_joint, n_states))
    for row in doc.get("utilities", []):
        s = _index_of(row["state"], states, "state")
        ja = joint_of(row["action"])
        nxt = _index_of(row["next"], states, "state")
        payoff = row["payoff"]
        if len(payoff) != n_players:
            raise ValueError("payoff must list one value per player")
        for j, v in enumerate(payoff):
            utilities[j, s, ja, nxt] = float(v)

    strategies = tuple(np.zeros((n_types[j], n_states, n_actions[j])) for j in range(n_players))
    for row in doc["strategies"]:
        j = _index_of(row["player"], players, "player")
        t = _index_of(row["type"], types[j], f"type of {players[j]}")
        s = _index_of(row["state"], states, "state")
        for a_label, prob in row["probs"].items():
            strategies[j][t, s, _index_of(a_label, actions[j], f"action of {players[j]}")] = float(
                prob
            )

    prior = np.asarray(doc["type_prior"], dtype=float)
    if prior.shape != n_types:
        raise ValueError(f"type_prior must have shape {n_types}, got {prior.shape}")

    return FiniteSBG(
        n_states=n_states,
        initial_state=initial,
        terminal=terminal,
        n_actions=n_actions,
        n_types=n_types,
        transition=transition,
        utilities=utilities,
        strategies=strategies,
        type_prior=prior,
        gamma=float(doc.get("gamma", 0.9)),
        horizon=int(doc.get("horizon", 3)),
        state_labels=tuple(states),
        player_labels=tuple(players),
        action_labels=tuple(tuple(a) for a in actions),
        type_labels=tuple(tuple(t) for t in types),
    )
