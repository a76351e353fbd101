"""Random K-fold partitions (plain and stratified) and hold-out splits.

All constructors shuffle with a seeded generator and deal indices
round-robin, which gives the balance guarantees exactly: plain fold sizes
differ by at most one, and stratified per-class fold counts differ by at
most one.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import rng_from_seed


@dataclass(frozen=True)
class FoldAssignment:
    """A partition of ``n`` record indices into ``K`` folds.

    ``fold_of[i]`` is the fold id of record ``i``. ``seed`` records the
    generator seed when the assignment came from a constructor here; a
    hand-built assignment may leave it None.
    """

    n: int
    K: int
    fold_of: np.ndarray
    seed: int | None = None

    def __post_init__(self) -> None:
        fold_of = np.array(self.fold_of, dtype=np.int64, copy=True)
        fold_of.setflags(write=False)
        object.__setattr__(self, "fold_of", fold_of)
        if fold_of.shape != (self.n,):
            raise ValueError(f"fold_of must have length n={self.n}")
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if fold_of.min() < 0 or fold_of.max() >= self.K:
            raise ValueError("fold ids must lie in [0, K)")

    def fold_indices(self, f: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == f)

    def train_indices(self, f: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != f)

    def fold_sizes(self) -> np.ndarray:
        return np.bincount(self.fold_of, minlength=self.K)


def _check_k(K: int, n: int) -> None:
    if K < 2:
        raise ValueError(f"fold count K must be >= 2, got {K}")
    if K > n:
        raise ValueError(f"fold count K={K} exceeds record count n={n}")
    if K == 2:
        # K >= 3 keeps training sets overlapping; 2 is legal but noisier.
        warnings.warn(
            "K=2 gives disjoint training sets; K >= 3 is recommended",
            UserWarning,
            stacklevel=3,
        )


def make_kfold(n: int, K: int, seed: int) -> FoldAssignment:
    """Uniformly random balanced K-fold assignment of ``n`` records.

    Shuffles ``[0, n)`` with the seeded generator and deals the shuffled
    indices round-robin into folds, so fold sizes differ by at most one.
    """
    _check_k(K, n)
    rng = rng_from_seed(seed)
    order = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n, dtype=np.int64) % K
    return FoldAssignment(n=n, K=K, fold_of=fold_of, seed=seed)


def make_stratified_kfold(labels: np.ndarray, K: int, seed: int) -> FoldAssignment:
    """K-fold assignment that balances every class across folds.

    Within each class the indices are shuffled and dealt round-robin, so
    per-class per-fold counts differ by at most one. Overall fold sizes can
    differ by up to the number of classes.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    _check_k(K, n)
    classes = np.unique(labels)
    counts = {int(c): int(np.count_nonzero(labels == c)) for c in classes}
    smallest = min(counts, key=lambda c: (counts[c], c))
    if K > counts[smallest]:
        raise ValueError(
            f"fold count K={K} exceeds size {counts[smallest]} of smallest "
            f"class {smallest}"
        )
    rng = rng_from_seed(seed)
    fold_of = np.empty(n, dtype=np.int64)
    for c in classes:
        idx = np.flatnonzero(labels == c)
        order = idx[rng.permutation(idx.shape[0])]
        fold_of[order] = np.arange(order.shape[0], dtype=np.int64) % K
    return FoldAssignment(n=n, K=K, fold_of=fold_of, seed=seed)


@dataclass(frozen=True)
class HoldoutSplit:
    """A single train/test split of ``[0, n)`` record indices."""

    train_idx: np.ndarray
    test_idx: np.ndarray
    test_fraction: float

    def __post_init__(self) -> None:
        for name in ("train_idx", "test_idx"):
            arr = np.array(getattr(self, name), dtype=np.int64, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.train_idx.shape[0] + self.test_idx.shape[0]


def make_holdout(n: int, test_fraction: float, seed: int) -> HoldoutSplit:
    """Seeded shuffle of ``[0, n)``; the first round(fraction * n) indices
    become the test side."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    t = round(test_fraction * n)
    if t < 1 or t > n - 1:
        raise ValueError(
            f"test_fraction={test_fraction} leaves a degenerate split for n={n}"
        )
    rng = rng_from_seed(seed)
    order = rng.permutation(n)
    return HoldoutSplit(
        train_idx=order[t:], test_idx=order[:t], test_fraction=test_fraction
    )
