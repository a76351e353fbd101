"""Fold assignments: balance, stratification, and reproducibility.

Every partition constructor is a pure function of (inputs, seed). Plain
K-fold balances fold sizes to within one record; the stratified variant
additionally balances every class across folds.
"""
import numpy as np

from jkcv import make_holdout, make_kfold, make_stratified_kfold

print("== plain 5-fold split of 23 records ==")
assignment = make_kfold(n=23, K=5, seed=42)
print("fold sizes:", assignment.fold_sizes().tolist())
print("fold of each record:", assignment.fold_of.tolist())

print("\nsame seed, same partition:",
      np.array_equal(assignment.fold_of, make_kfold(23, 5, seed=42).fold_of))
print("new seed, new partition: ",
      not np.array_equal(assignment.fold_of, make_kfold(23, 5, seed=43).fold_of))

print("\n== stratified 4-fold split, 12 positives / 8 negatives ==")
labels = np.array([1] * 12 + [0] * 8)
stratified = make_stratified_kfold(labels, K=4, seed=7)
for f in range(4):
    fold_labels = labels[stratified.fold_indices(f)]
    print(f"fold {f}: {len(fold_labels)} records, "
          f"{int(fold_labels.sum())} positive / {int((1 - fold_labels).sum())} negative")

print("\n== 30/70 holdout of 10 records ==")
split = make_holdout(n=10, test_fraction=0.3, seed=1)
print("train:", sorted(split.train_idx.tolist()))
print("test: ", sorted(split.test_idx.tolist()))
