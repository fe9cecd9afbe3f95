"""Independent reference routines for the hidden-type game evaluator.

Everything here re-derives results from first principles with plain loops and
dictionaries, deliberately sharing no code with the package implementation:
the posterior is recomputed from scratch via explicit Bayes products, the
payoff recursion is inlined, and joint actions are flattened by hand.  The
test suite compares the package evaluator against these routines on
randomized games.
"""

from __future__ import annotations

import itertools

import numpy as np

from posbg.hba import FiniteSBG


def _opponents(game: FiniteSBG, player: int) -> list[int]:
    return [j for j in range(game.n_players) if j != player]


def _joint_flat(game: FiniteSBG, joint: tuple[int, ...]) -> int:
    idx = 0
    for j in range(game.n_players):
        idx = idx * game.n_actions[j] + joint[j]
    return idx


def _profile_prior(game: FiniteSBG, player: int, profile: tuple[int, ...]) -> float:
    """Prior probability of an opponent type profile, marginalizing the
    joint prior over the evaluating player's own types by direct summation."""
    opponents = _opponents(game, player)
    total = 0.0
    for assignment in itertools.product(*(range(t) for t in game.n_types)):
        if all(assignment[j] == profile[k] for k, j in enumerate(opponents)):
            total += float(game.type_prior[assignment])
    return total


def oracle_posterior(
    game: FiniteSBG,
    player: int,
    states: tuple[int, ...],
    joints: tuple[tuple[int, ...], ...],
) -> dict[tuple[int, ...], float]:
    """Posterior over opponent type profiles by explicit Bayes products."""
    opponents = _opponents(game, player)
    profiles = list(itertools.product(*(range(game.n_types[j]) for j in opponents)))
    weights = {}
    for profile in profiles:
        w = _profile_prior(game, player, profile)
        for tau, joint in enumerate(joints):
            state = states[tau]
            for k, j in enumerate(opponents):
                w *= float(game.strategies[j][profile[k], state, joint[j]])
        weights[profile] = w
    total = sum(weights.values())
    if total == 0.0:
        weights = {pf: _profile_prior(game, player, pf) for pf in profiles}
        total = sum(weights.values())
    return {pf: w / total for pf, w in weights.items()}


def oracle_expected_payoff(
    game: FiniteSBG,
    player: int,
    state: int,
    action: int,
    states: tuple[int, ...],
    joints: tuple[tuple[int, ...], ...],
    depth: int = 0,
) -> float:
    """Exhaustive game-tree expansion of the expected discounted payoff."""
    if state in game.terminal or depth >= game.horizon:
        return 0.0
    posterior = oracle_posterior(game, player, states, joints)
    opponents = _opponents(game, player)
    total = 0.0
    for profile, p_profile in posterior.items():
        for opp_actions in itertools.product(*(range(game.n_actions[j]) for j in opponents)):
            weight = p_profile
            for k, j in enumerate(opponents):
                weight *= float(game.strategies[j][profile[k], state, opp_actions[k]])
            if weight == 0.0:
                continue
            joint = [0] * game.n_players
            joint[player] = action
            for k, j in enumerate(opponents):
                joint[j] = opp_actions[k]
            joint_t = tuple(joint)
            flat = _joint_flat(game, joint_t)
            q = 0.0
            for nxt in range(game.n_states):
                t_prob = float(game.transition[state, flat, nxt])
                if t_prob == 0.0:
                    continue
                v = float(game.utilities[player, state, flat, nxt])
                if game.gamma > 0.0 and nxt not in game.terminal and depth + 1 < game.horizon:
                    continuation = max(
                        oracle_expected_payoff(
                            game,
                            player,
                            nxt,
                            a2,
                            states + (nxt,),
                            joints + (joint_t,),
                            depth + 1,
                        )
                        for a2 in range(game.n_actions[player])
                    )
                    v += game.gamma * continuation
                q += t_prob * v
            total += weight * q
    return total


def random_game(
    rng: np.random.Generator,
    max_states: int = 3,
    max_actions: int = 2,
    max_types: int = 2,
    max_horizon: int = 3,
    allow_zero_gamma: bool = True,
) -> FiniteSBG:
    """A random small two-player game with hidden types, always valid."""
    n_states = int(rng.integers(1, max_states + 1))
    n_actions = tuple(int(rng.integers(1, max_actions + 1)) for _ in range(2))
    n_types = tuple(int(rng.integers(1, max_types + 1)) for _ in range(2))
    n_joint = n_actions[0] * n_actions[1]
    # Terminal states: anything but the initial state, each with prob 0.3.
    terminal = frozenset(s for s in range(1, n_states) if rng.random() < 0.3)

    transition = rng.random((n_states, n_joint, n_states))
    transition /= transition.sum(axis=2, keepdims=True)
    utilities = rng.uniform(-5.0, 5.0, size=(2, n_states, n_joint, n_states))
    strategies = []
    for j in range(2):
        table = rng.random((n_types[j], n_states, n_actions[j])) + 0.05
        table /= table.sum(axis=2, keepdims=True)
        strategies.append(table)
    prior = rng.random(n_types) + 0.05
    prior /= prior.sum()
    if allow_zero_gamma and rng.random() < 0.2:
        gamma = 0.0
    else:
        gamma = float(rng.uniform(0.1, 0.95))
    return FiniteSBG(
        n_states=n_states,
        initial_state=0,
        terminal=terminal,
        n_actions=n_actions,
        n_types=n_types,
        transition=transition,
        utilities=utilities,
        strategies=tuple(strategies),
        type_prior=prior,
        gamma=gamma,
        horizon=int(rng.integers(1, max_horizon + 1)),
    )


def random_history(
    game: FiniteSBG, rng: np.random.Generator, max_steps: int = 3
) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """A reachable history: actions sampled from the per-type strategies of a
    prior-sampled type profile, states sampled from the transition kernel."""
    flat_prior = game.type_prior.reshape(-1)
    profile_idx = int(rng.choice(flat_prior.size, p=flat_prior))
    profile = np.unravel_index(profile_idx, game.type_prior.shape)
    states: tuple[int, ...] = (game.initial_state,)
    joints: tuple[tuple[int, ...], ...] = ()
    for _ in range(int(rng.integers(0, max_steps + 1))):
        state = states[-1]
        if state in game.terminal:
            break
        joint = tuple(
            int(rng.choice(game.n_actions[j], p=game.strategies[j][profile[j], state]))
            for j in range(game.n_players)
        )
        nxt = int(rng.choice(game.n_states, p=game.transition[state, _joint_flat(game, joint)]))
        joints = joints + (joint,)
        states = states + (nxt,)
    return states, joints
