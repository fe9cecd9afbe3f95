"""Watching the zero-knowledge attacker learn.

The learner sees nothing but (win/loss, steps survived) per attempt.  It
keeps a Beta belief over the per-step alert rate, plans a lifespan from the
posterior mean before each attempt, and updates with pseudo-counts after:
a loss at duration d looks like one threshold arrival in d steps; a win
looks like d quiet steps.

This script replays one session at the low-detection corner and prints the
belief trajectory, then contrasts session statistics across environments.
"""

from posbg import (
    BetaPosterior,
    GameParams,
    PartialKnowledgeAttacker,
    RandomSource,
    ThresholdDefender,
    compute_threshold,
    joint_alert_rate,
    run_episode,
    run_zk_session,
    zk_plan,
    zk_update,
)

P, Q = 0.01, 0.01
params = GameParams(P, Q)
defender = ThresholdDefender.for_rates(P, Q)
rng = RandomSource(40)

print(f"environment: p={P} q={Q} (joint rate {joint_alert_rate(P, Q):.4f}), "
      f"defender threshold {defender.threshold}\n")
print("attempt  belief-mean  lifespan  outcome      score  duration")

posterior = BetaPosterior()
for attempt in range(1, 11):
    planned_threshold = compute_threshold(posterior.mean, 0.0)
    plan = zk_plan(posterior)
    outcome = run_episode(PartialKnowledgeAttacker(plan.lifespan), defender, params, rng)
    verdict = "win" if outcome.attacker_won else "caught"
    print(f"{attempt:>7}  {posterior.mean:>11.4f}  {plan.lifespan:>8}  "
          f"{verdict:<11}  {outcome.score:>5}  {outcome.duration:>8}")
    posterior = zk_update(posterior, outcome, planned_threshold)

print("\nWins push the rate estimate down, doubling the next plan; the first"
      "\nloss snaps it back toward 1/duration. The oscillation is the price of"
      "\nlearning from censored feedback only.\n")

for p, q in [(0.01, 0.01), (0.1, 0.1), (0.5, 0.25)]:
    env = GameParams(p, q)
    d = ThresholdDefender.for_rates(p, q)
    sessions = [run_zk_session(env, d, 10, RandomSource(1000 + i)) for i in range(200)]
    mean = sum(s.mean_score for s in sessions) / len(sessions)
    wr = sum(s.win_rate for s in sessions) / len(sessions)
    best = max(s.max_score for s in sessions)
    print(f"p={p:<5} q={q:<5} mean session score {mean:7.3f}  "
          f"win rate {wr:.3f}  best attempt {best}")
