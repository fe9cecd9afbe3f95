"""A desk-scale parameter sweep across all three attacker knowledge models.

Runs a coarse grid at modest trial counts, prints per-model grand means, and
demonstrates the determinism contract: the serialized report is byte-identical
no matter how many worker threads run the cells.

The full-scale reproduction (20x20 grid, 1e6 trials per cell) is the same
call with bigger numbers, or from the shell:

    posbg run-sweep --grid-points 20 --trials 1000000 --models fk,pk,zk \
        --seed 1 --out results.csv
"""

from posbg import AttackerModelKind, GridSpec, run_sweep

GRID = GridSpec(points=6)
TRIALS = 2000
SEED = 1

report = run_sweep(GRID, list(AttackerModelKind), trials=TRIALS, master_seed=SEED, jobs=4)

print(f"grid {GRID.points}x{GRID.points}, {TRIALS} trials per cell, seed {SEED}\n")
for model in AttackerModelKind:
    grand = report.grand_mean(model)
    win = report.mean_win_rate(model)
    print(f"  {model.value}: grand mean score {grand:8.4f}   mean win rate {win:.4f}")

print("\nScore decreases as attacker knowledge shrinks, while the blind"
      "\nmodels keep high win rates by stopping conservatively.")

again = run_sweep(GRID, list(AttackerModelKind), trials=TRIALS, master_seed=SEED, jobs=1)
print(f"\nbyte-identical across 4 workers vs 1: {report.to_csv() == again.to_csv()}")

sample = report.to_csv().splitlines()
print("\nCSV head:")
for line in sample[:4]:
    print("  " + line)
