"""Planning formulas: defender thresholds and blind-attacker lifespans.

The defender picks the alert count that ends the game before play starts:
the expected number of alerts accumulated by the time the first true-positive
lands, floored.  A blind attacker inverts the same reasoning: it acts for the
expected number of quiet steps before the threshold-th alert and then stops.

This script prints both surfaces on a coarse grid, plus the two closed-form
oracles used to verify the simulator: the expected full-knowledge score
(threshold / joint rate) and the blind attacker's exact win probability (a
negative-binomial arrival tail).
"""

from posbg import (
    LifespanVariant,
    compute_lifespan,
    compute_threshold,
    fk_expected_score,
    joint_alert_rate,
    nb_arrival_tail,
)

VALUES = [0.01, 0.12, 0.25, 0.5, 0.75, 0.99]


def show_table(title, fn, fmt="{:>8}"):
    print(f"\n{title} (rows: p, cols: q)")
    print("      " + "".join(f"{q:>9.2f}" for q in VALUES))
    for p in VALUES:
        cells = "".join(f"{fn(p, q):>9}" for q in VALUES)
        print(f"p={p:<5.2f}{cells}")


show_table("defender threshold", lambda p, q: compute_threshold(p, q))
show_table("blind lifespan (exact-threshold variant)",
           lambda p, q: compute_lifespan(p, q))
show_table("blind lifespan (closed-form variant)",
           lambda p, q: compute_lifespan(p, q, LifespanVariant.CLOSED_FORM))

print("\nclosed-form oracles at selected cells:")
for p, q in [(0.01, 0.01), (0.01, 0.99), (0.5, 0.5)]:
    th = compute_threshold(p, q)
    lifespan = compute_lifespan(p, q)
    rate = joint_alert_rate(p, q)
    print(f"  p={p} q={q}: rate={rate:.4f} threshold={th} "
          f"E[FK score]={fk_expected_score(p, q):.4f} "
          f"P[blind win]={nb_arrival_tail(th, rate, lifespan):.5f}")

print("\nThe low-detection corner is where the blind attacker overreaches:"
      "\nits planned lifespan tracks the mean arrival step, but arrival has"
      "\nhuge variance when rates are small, so it is often caught mid-run.")
