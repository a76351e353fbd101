"""K-fold and J-K-fold cross-validation estimates for a fixed configuration.

A J-K-fold estimate averages the K-fold estimates from J independent
random partitionings. Repetitions are stochastically independent and
identically distributed, so averaging J of them divides the partitioning
variance by J while leaving the bias unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, Metric, SeedPath
from .learners import LearnerSpec, fit, predict
from .parallel import ordered_map
from .partition import FoldAssignment, HoldoutSplit, make_kfold, make_stratified_kfold


@dataclass(frozen=True)
class CVEstimate:
    """Per-fold scores of one K-fold run and their exact arithmetic mean.

    Carries the partition seed and the seed path so any single fold fit can
    be re-derived in isolation. ``degenerate`` flags folds whose training
    side lost a class entirely.
    """

    fold_scores: tuple[float, ...]
    K: int
    partition_seed: int | None
    seed_path: SeedPath
    degenerate: bool = False
    mean: float = field(init=False)

    def __post_init__(self) -> None:
        if len(self.fold_scores) != self.K:
            raise ValueError(
                f"expected {self.K} fold scores, got {len(self.fold_scores)}"
            )
        object.__setattr__(self, "mean", sum(self.fold_scores) / self.K)


@dataclass(frozen=True)
class JKEstimate:
    """J repetition estimates and their exact arithmetic mean."""

    repetition_estimates: tuple[CVEstimate, ...]
    J: int
    K: int
    seed_path: SeedPath
    mean: float = field(init=False)
    degenerate: bool = field(init=False)

    def __post_init__(self) -> None:
        if len(self.repetition_estimates) != self.J:
            raise ValueError(
                f"expected {self.J} repetitions, got {len(self.repetition_estimates)}"
            )
        object.__setattr__(
            self, "mean", sum(r.mean for r in self.repetition_estimates) / self.J
        )
        object.__setattr__(
            self, "degenerate", any(r.degenerate for r in self.repetition_estimates)
        )


def make_assignment(data: Dataset, K: int, stratified: bool, seed: int) -> FoldAssignment:
    if stratified:
        return make_stratified_kfold(data.labels, K, seed)
    return make_kfold(data.n, K, seed)


def kfold_estimate(
    data: Dataset,
    spec: LearnerSpec,
    params,
    assignment: FoldAssignment,
    metric: Metric,
    seed_path: SeedPath,
) -> CVEstimate:
    """Hold out each fold in turn, train on the rest, score the fold.

    The learner seed for fold f is derived from ``seed_path`` extended by
    f. A fold whose training side is missing a class is still scored (the
    learner emits the seen classes only) but flags the estimate.
    """
    if assignment.n != data.n:
        raise ValueError(
            f"assignment covers {assignment.n} records, dataset has {data.n}"
        )
    scores: list[float] = []
    degenerate = False
    for f in range(assignment.K):
        train = data.subset(assignment.train_indices(f))
        if np.unique(train.labels).shape[0] < data.class_count:
            degenerate = True
        model = fit(spec, params, train, seed_path.child(f).learner_seed())
        test_idx = assignment.fold_indices(f)
        predicted = predict(model, data.features[test_idx])
        scores.append(metric.score(predicted, data.labels[test_idx]))
    return CVEstimate(
        fold_scores=tuple(scores),
        K=assignment.K,
        partition_seed=assignment.seed,
        seed_path=seed_path,
        degenerate=degenerate,
    )


def _repetition_worker(args) -> CVEstimate:
    data, spec, params, K, stratified, metric, seed_path, j = args
    rep_path = seed_path.child(j)
    assignment = make_assignment(data, K, stratified, rep_path.partition_seed())
    return kfold_estimate(data, spec, params, assignment, metric, rep_path)


def jkfold_estimate(
    data: Dataset,
    spec: LearnerSpec,
    params,
    J: int,
    K: int,
    stratified: bool,
    metric: Metric,
    seed_path: SeedPath,
    workers: int = 1,
) -> JKEstimate:
    """Average the K-fold estimates from J independent partitionings.

    Repetition j draws its partition seed from ``seed_path`` extended by j,
    so each (j, fold) fit is an independently schedulable work unit; the
    result is identical for any worker count.
    """
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    units = [
        (data, spec, params, K, stratified, metric, seed_path, j) for j in range(J)
    ]
    reps = ordered_map(_repetition_worker, units, workers)
    return JKEstimate(
        repetition_estimates=tuple(reps), J=J, K=K, seed_path=seed_path
    )


def holdout_estimate(
    data: Dataset,
    spec: LearnerSpec,
    params,
    split: HoldoutSplit,
    metric: Metric,
    seed_path: SeedPath,
) -> float:
    """Fit on the train side of a holdout split, score the test side."""
    if split.n != data.n:
        raise ValueError(f"split covers {split.n} records, dataset has {data.n}")
    train = data.subset(split.train_idx)
    model = fit(spec, params, train, seed_path.learner_seed())
    predicted = predict(model, data.features[split.test_idx])
    return metric.score(predicted, data.labels[split.test_idx])


def global_score(
    train_pool: Dataset,
    heldout_pool: Dataset,
    spec: LearnerSpec,
    params,
    metric: Metric,
    seed_path: SeedPath,
) -> float:
    """Fit on the entire training pool and score on a large held-out pool.

    This is the ground-truth proxy for how good a tuned parameter choice
    really is; it depends on the parameters and the fixed fit seed, not on
    any partitioning.
    """
    if heldout_pool.d != train_pool.d:
        raise ValueError(
            f"held-out pool width {heldout_pool.d} != training width {train_pool.d}"
        )
    model = fit(spec, params, train_pool, seed_path.global_fit_seed())
    predicted = predict(model, heldout_pool.features)
    return metric.score(predicted, heldout_pool.labels)
