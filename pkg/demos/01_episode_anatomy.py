"""Anatomy of a single episode.

Plays a few episodes step by step and prints the trace format used by the
CLI's ``run-episode --trace``: one line per step,

    t, attacker_action, defender_action, alert, alert_count, infection_count

The defender passes until the alert count reaches its precomputed threshold.
A full-knowledge attacker watches the same counter and always stops on the
same step (a tie the attacker wins, by default); a blind attacker commits to
a fixed number of actions up front and may get caught.
"""

from posbg import (
    FullKnowledgeAttacker,
    GameParams,
    PartialKnowledgeAttacker,
    RandomSource,
    ThresholdDefender,
    compute_lifespan,
    compute_threshold,
    run_episode,
)

P, Q = 0.25, 0.1
threshold = compute_threshold(P, Q)
lifespan = compute_lifespan(P, Q)
params = GameParams(P, Q)
defender = ThresholdDefender(threshold)

print(f"environment: p={P} q={Q}  ->  defender threshold {threshold}, "
      f"blind-attacker lifespan {lifespan}")

print("\n--- full-knowledge attacker (seed 11) ---")
trace = []
result = run_episode(FullKnowledgeAttacker(threshold), defender, params,
                     RandomSource(11), trace=trace)
for row in trace:
    print("  " + row.format())
print(f"outcome: won={result.attacker_won} score={result.score} "
      f"duration={result.duration} ended_by={result.ended_by.value}")

print("\n--- blind attacker, same stream ---")
trace = []
result = run_episode(PartialKnowledgeAttacker(lifespan), defender, params,
                     RandomSource(11), trace=trace)
for row in trace:
    print("  " + row.format())
print(f"outcome: won={result.attacker_won} score={result.score} "
      f"duration={result.duration} ended_by={result.ended_by.value}")

print("\nReplaying either episode with the same seed reproduces it bit for bit;"
      "\neach acting step consumes exactly two draws, the final step none.")
