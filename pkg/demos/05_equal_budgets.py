"""Where should a fixed fit budget J*K go: more folds or more repetitions?

Configurations with the same total number of model fits are compared head
to head. Within each budget group, spending the budget on repetitions
(higher J, lower K) gives the least variable tuning, which is the whole
case for J-K-fold CV over the 1-(J*K)-fold alternative.
"""
import math

from jkcv import LearnerSpec, ParamGrid, compare_budgets, generate_synthetic

data = generate_synthetic(n=200, d=5, class_count=2, separation=2.0, seed=20260810)
learner = LearnerSpec.make("logistic_l2")
grid = ParamGrid.make(C=(0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0))

comparison = compare_budgets(
    data, None, learner, grid,
    configs=[(1, 10), (2, 5), (1, 20), (2, 10), (4, 5)],
    stratified=True, R=60, master_seed=5, workers=0,
)

print("tuning C over 60 partition replicates, grouped by budget J*K\n")
print(f"{'config':>12} {'budget':>7} {'SD chosen log10(C)':>20} {'SD of estimate':>15}")
for budget, rows in sorted(comparison.groups().items()):
    for row in rows:
        logs = [math.log10(v) for v in row.report.chosen_values("C")]
        mean = sum(logs) / len(logs)
        sd = math.sqrt(sum((v - mean) ** 2 for v in logs) / (len(logs) - 1))
        print(f"{f'{row.J}-{row.K}-fold':>12} {budget:>7} {sd:>20.3f} "
              f"{row.report.estimate_sd:>15.5f}")
    print()

print("Reading down a budget group: the high-J row is the stable one.")
