"""Exact best responses against an opponent of unknown type.

Builds a small two-player game in which the defender is either lenient
(always watches) or strict (often blocks).  The attacker starts with a 50/50
prior, watches the play unfold, and scores each of its actions by exact
expansion of the game tree under the current type posterior.

The same game can be written as JSON and fed to ``posbg hba-eval``; see the
README for the schema.
"""

import numpy as np

from posbg import FiniteSBG, History, action_values, hba_action, type_posterior

# States: 0 = active, 1 = over (terminal).
# Attacker actions: 0 = press on, 1 = cash out.  Defender: 0 = watch, 1 = block.
transition = np.zeros((2, 4, 2))
transition[0, 0] = [1.0, 0.0]  # press + watch: game continues
transition[0, 1] = [0.0, 1.0]  # press + block: shut down
transition[0, 2] = [0.0, 1.0]  # cash out ends it
transition[0, 3] = [0.0, 1.0]

utilities = np.zeros((2, 2, 4, 2))
utilities[0, 0, 0, 0] = 1.0   # pressing on under a watchful defender pays
utilities[0, 0, 1, 1] = -2.0  # pressing into a block is costly
utilities[0, 0, 2, 1] = 0.4   # cashing out banks a small sure gain
utilities[0, 0, 3, 1] = 0.4

attacker_strategy = np.full((1, 2, 2), 0.5)
defender_strategy = np.zeros((2, 2, 2))
defender_strategy[0, :, :] = [1.0, 0.0]  # lenient type: always watch
defender_strategy[1, :, :] = [0.3, 0.7]  # strict type: mostly block

game = FiniteSBG(
    n_states=2,
    initial_state=0,
    terminal=frozenset({1}),
    n_actions=(2, 2),
    n_types=(1, 2),
    transition=transition,
    utilities=utilities,
    strategies=(attacker_strategy, defender_strategy),
    type_prior=np.array([[0.5, 0.5]]),
    gamma=0.8,
    horizon=4,
)

ACTIONS = ["press on", "cash out"]

history = History((0,))
print("fresh game, uniform prior over defender types:")
post = type_posterior(game, history, player=0)
print(f"  posterior(lenient)={post.probs[0]:.3f}  posterior(strict)={post.probs[1]:.3f}")
for name, value in zip(ACTIONS, action_values(game, 0, 0, history)):
    print(f"  E[{name}] = {value:+.4f}")
print(f"  chosen: {ACTIONS[hba_action(game, 0, 0, history)]}")

print("\nafter surviving two watched steps:")
history = history.extend((0, 0), 0).extend((0, 0), 0)
post = type_posterior(game, history, player=0)
print(f"  posterior(lenient)={post.probs[0]:.3f}  posterior(strict)={post.probs[1]:.3f}")
for name, value in zip(ACTIONS, action_values(game, 0, 0, history)):
    print(f"  E[{name}] = {value:+.4f}")
print(f"  chosen: {ACTIONS[hba_action(game, 0, 0, history)]}")

print("\nEvery watched step is evidence of the lenient type, so pressing on"
      "\nbecomes more attractive as the posterior shifts.")
