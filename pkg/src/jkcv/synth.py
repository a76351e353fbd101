"""Synthetic Gaussian-blob classification datasets.

A desk-scale stand-in for real corpora: one isotropic unit-variance blob
per class, centers a configurable distance apart, balanced class sizes.
"""
from __future__ import annotations

import numpy as np

from .core import Dataset, rng_from_seed


def generate_synthetic(
    n: int, d: int, class_count: int, separation: float, seed: int
) -> Dataset:
    """Isotropic Gaussian blobs, one per class, balanced sizes (max diff 1).

    With d >= class_count the centers sit on a regular simplex whose every
    pairwise distance is exactly ``separation``; otherwise they are spaced
    ``separation`` apart along the first axis. Rows are shuffled with the
    same seeded generator, so the output is a pure function of the inputs.
    """
    if class_count < 2:
        raise ValueError(f"class_count must be >= 2, got {class_count}")
    if n < class_count:
        raise ValueError(f"need n >= class_count, got n={n} < {class_count}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if not np.isfinite(separation) or separation < 0:
        raise ValueError(f"separation must be a finite value >= 0, got {separation}")
    rng = rng_from_seed(seed)
    base, extra = divmod(n, class_count)
    sizes = [base + 1 if c < extra else base for c in range(class_count)]
    centers = np.zeros((class_count, d))
    if d >= class_count:
        # |s/sqrt(2) * (e_i - e_j)| = s for i != j
        for c in range(class_count):
            centers[c, c] = separation / np.sqrt(2.0)
        centers -= centers.mean(axis=0)
    else:
        centers[:, 0] = separation * np.arange(class_count)
    blocks, labels = [], []
    for c in range(class_count):
        blocks.append(rng.normal(loc=centers[c], scale=1.0, size=(sizes[c], d)))
        labels.append(np.full(sizes[c], c, dtype=np.int64))
    X = np.vstack(blocks)
    y = np.concatenate(labels)
    order = rng.permutation(n)
    return Dataset(X[order], y[order], class_count)
