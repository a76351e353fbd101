"""Shared domain types, deterministic seed derivation, and metrics.

Every stochastic work unit in this package (a fold assignment, a single
learner fit, a synthetic data draw) gets its random seed from one master
seed plus an integer path identifying the unit. Paths always end in a
purpose tag, so e.g. the partition seed for repetition 3 can never collide
with a learner seed whose index prefix happens to be 3.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .learners import LearnerSpec
    from .tune import ParamGrid

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Purpose tags terminate every derived path (see module docstring).
TAG_PARTITION = 101
TAG_LEARNER = 102
TAG_GLOBAL_FIT = 103
TAG_DATA = 104


def _mix64(z: int) -> int:
    """SplitMix64 finalizer: the 30/27/31 shift-xor-multiply chain."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master: int, path: Sequence[int]) -> int:
    """Derive a 64-bit seed from a master seed and a work-unit path.

    The mixing function is the SplitMix64 finalizer folded over the master
    seed and then each path element:

        h = mix(master + GOLDEN)
        h = mix((h ^ element) + GOLDEN)   for each element in order

    Pure and platform-independent: identical inputs give identical outputs
    on any machine, and distinct paths give statistically unrelated seeds.
    """
    if len(path) == 0:
        raise ValueError("seed path must contain at least one element")
    if not 0 <= master <= _MASK64:
        raise ValueError(f"master seed out of 64-bit range: {master}")
    h = _mix64((int(master) + _GOLDEN) & _MASK64)
    for element in path:
        e = int(element)
        if not 0 <= e <= _MASK64:
            raise ValueError(f"path element out of 64-bit range: {element}")
        h = _mix64(((h ^ e) + _GOLDEN) & _MASK64)
    return h


def rng_from_seed(seed: int) -> np.random.Generator:
    """A PCG64 generator pinned explicitly so streams stay reproducible."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class SeedPath:
    """A master seed plus the integer path of one work unit.

    ``child`` extends the path; the ``*_seed`` accessors append the purpose
    tag and derive the actual 64-bit seed.
    """

    master_seed: int
    path: tuple[int, ...] = ()

    def child(self, *elements: int) -> "SeedPath":
        return SeedPath(self.master_seed, self.path + tuple(int(e) for e in elements))

    def seed_for(self, tag: int) -> int:
        return derive_seed(self.master_seed, self.path + (tag,))

    def partition_seed(self) -> int:
        return self.seed_for(TAG_PARTITION)

    def learner_seed(self) -> int:
        return self.seed_for(TAG_LEARNER)

    def global_fit_seed(self) -> int:
        return self.seed_for(TAG_GLOBAL_FIT)

    def data_seed(self) -> int:
        return self.seed_for(TAG_DATA)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """A feature matrix with dense integer class labels.

    Labels must already be dense ids in ``[0, class_count)``; string labels
    are mapped at ingestion (see :mod:`jkcv.textfeat`). Arrays are marked
    read-only so instances are safe to share across workers.
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int = 0  # 0 means "infer as max label + 1"

    def __post_init__(self) -> None:
        features = _freeze(np.array(self.features, dtype=np.float64, copy=True))
        labels = _freeze(np.array(self.labels, dtype=np.int64, copy=True))
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        if features.ndim != 2:
            raise ValueError(f"features must be 2-d, got shape {features.shape}")
        if labels.ndim != 1:
            raise ValueError(f"labels must be 1-d, got shape {labels.shape}")
        n, d = features.shape
        if n < 1 or d < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
        if labels.shape[0] != n:
            raise ValueError(f"labels length {labels.shape[0]} != n rows {n}")
        if labels.min() < 0:
            raise ValueError("labels must be non-negative")
        class_count = self.class_count or int(labels.max()) + 1
        if class_count < 2:
            raise ValueError(f"class_count must be >= 2, got {class_count}")
        if int(labels.max()) >= class_count:
            raise ValueError(
                f"label {int(labels.max())} outside [0, {class_count})"
            )
        object.__setattr__(self, "class_count", class_count)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Row subset as a new Dataset; keeps the parent's class_count."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.class_count)


def accuracy(predicted: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of positions where predicted equals truth, in [0, 1]."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ValueError(
            f"prediction/truth shape mismatch: {predicted.shape} vs {truth.shape}"
        )
    if predicted.shape[0] < 1:
        raise ValueError("need at least one record to score")
    return float(np.count_nonzero(predicted == truth)) / predicted.shape[0]


_METRICS: dict[str, Callable[[np.ndarray, np.ndarray], float]] = {
    "accuracy": accuracy,
}


@dataclass(frozen=True)
class Metric:
    """A named scoring function; ``accuracy`` is the only built-in kind."""

    kind: str = "accuracy"

    def __post_init__(self) -> None:
        if self.kind not in _METRICS:
            raise ValueError(f"unknown metric kind {self.kind!r}")

    def score(self, predicted: np.ndarray, truth: np.ndarray) -> float:
        return _METRICS[self.kind](predicted, truth)


ACCURACY = Metric("accuracy")


@dataclass(frozen=True)
class RunConfig:
    """One experiment's knobs: repetitions J, folds K, seeds, learner, grid."""

    J: int
    K: int
    stratified: bool
    master_seed: int
    learner_spec: "LearnerSpec"
    metric: Metric = ACCURACY
    grid: "ParamGrid | None" = None
    replicates: int = 1

    def __post_init__(self) -> None:
        if self.J < 1:
            raise ValueError(f"J must be >= 1, got {self.J}")
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 bits")

    def validate_for(self, data: Dataset) -> None:
        """Check the fold count against a concrete dataset."""
        if self.K > data.n:
            raise ValueError(f"K={self.K} exceeds record count n={data.n}")
        if self.stratified:
            counts = np.bincount(data.labels, minlength=data.class_count)
            smallest = int(counts.argmin())
            if self.K > counts[smallest]:
                raise ValueError(
                    f"K={self.K} exceeds size {int(counts[smallest])} of "
                    f"smallest class {smallest}"
                )
