"""Grid-search tuning driven by J-K-fold cross-validation estimates.

The same J fold assignments are reused across every grid point (partition
seeds depend on the repetition index only), so comparisons between points
are paired and partition noise cancels out of the between-point contrast.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import Dataset, Metric, SeedPath
from .estimate import JKEstimate, kfold_estimate, make_assignment
from .learners import LearnerSpec
from .parallel import ordered_map


@dataclass(frozen=True)
class ParamPoint:
    """One cell of a parameter grid: an immutable name -> value mapping."""

    items: tuple[tuple[str, float | int], ...]

    def __post_init__(self) -> None:
        items = tuple(sorted((str(k), v) for k, v in self.items))
        names = [k for k, _ in items]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {names}")
        if not items:
            raise ValueError("a parameter point needs at least one entry")
        object.__setattr__(self, "items", items)

    @classmethod
    def make(cls, **values) -> "ParamPoint":
        return cls(tuple(values.items()))

    def as_dict(self) -> dict:
        return dict(self.items)

    def __getitem__(self, name: str):
        for k, v in self.items:
            if k == name:
                return v
        raise KeyError(name)

    def names(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.items)


@dataclass(frozen=True)
class ParamGrid:
    """Ordered axes of a finite search space.

    Numeric value lists are sorted ascending at construction;
    ``sort_values=False`` is a test hook that preserves the given order
    (used to check that tuning results do not depend on enumeration order).
    """

    axes: tuple[tuple[str, tuple[float | int, ...]], ...]
    sort_values: bool = True

    def __post_init__(self) -> None:
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        seen = set()
        fixed = []
        for name, values in self.axes:
            name = str(name)
            if name in seen:
                raise ValueError(f"duplicate grid axis {name!r}")
            seen.add(name)
            values = tuple(values)
            if not values:
                raise ValueError(f"grid axis {name!r} has no values")
            if len(set(values)) != len(values):
                raise ValueError(f"grid axis {name!r} has duplicate values")
            if self.sort_values:
                values = tuple(sorted(values))
            fixed.append((name, values))
        object.__setattr__(self, "axes", tuple(fixed))

    @classmethod
    def make(cls, **axes) -> "ParamGrid":
        return cls(tuple((k, tuple(v)) for k, v in axes.items()))

    def axis_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.axes)

    def points(self) -> list[ParamPoint]:
        """All grid cells, first axis slowest."""
        names = self.axis_names()
        return [
            ParamPoint(tuple(zip(names, combo)))
            for combo in itertools.product(*(vals for _, vals in self.axes))
        ]

    def __len__(self) -> int:
        size = 1
        for _, vals in self.axes:
            size *= len(vals)
        return size

    def canonical_rank(self, point: ParamPoint) -> int:
        """Position of a point in the value-sorted enumeration.

        Learner seeds use this rank rather than the raw enumeration index,
        so reordering a value list cannot change which seed a point gets.
        """
        rank = 0
        for name, values in self.axes:
            ordered = sorted(values)
            rank = rank * len(ordered) + ordered.index(point[name])
        return rank


def tie_break(points: list[ParamPoint], axis_order: tuple[str, ...] | None = None) -> ParamPoint:
    """Lexicographically smallest point by axis order, then value."""
    if not points:
        raise ValueError("tie_break needs at least one point")
    order = axis_order if axis_order is not None else points[0].names()
    return min(points, key=lambda p: tuple(p[name] for name in order))


@dataclass(frozen=True)
class TuningResult:
    """The argmax point of a grid search plus every point's estimate."""

    chosen: ParamPoint
    estimates: dict
    chosen_estimate: float
    J: int
    K: int
    seed_path: SeedPath
    degenerate: bool = False


def _point_repetition_worker(args):
    data, spec, point, assignment, metric, rep_path = args
    return kfold_estimate(data, spec, point, assignment, metric, rep_path)


def grid_tune(
    data: Dataset,
    spec: LearnerSpec,
    grid: ParamGrid,
    J: int,
    K: int,
    stratified: bool,
    metric: Metric,
    seed_path: SeedPath,
    workers: int = 1,
) -> TuningResult:
    """Evaluate every grid point with J-K-fold CV and pick the best mean.

    Partition seeds come from ``seed_path`` extended by the repetition
    index alone, so all points see identical fold assignments. Learner
    seeds additionally mix in the point's canonical grid rank, making each
    (point, repetition, fold) fit an independent work unit.
    """
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    points = grid.points()
    assignments = [
        make_assignment(data, K, stratified, seed_path.child(j).partition_seed())
        for j in range(J)
    ]
    units = []
    for point in points:
        rank = grid.canonical_rank(point)
        for j in range(J):
            units.append(
                (data, spec, point, assignments[j], metric, seed_path.child(j, rank))
            )
    results = ordered_map(_point_repetition_worker, units, workers)
    estimates: dict[ParamPoint, JKEstimate] = {}
    for i, point in enumerate(points):
        reps = tuple(results[i * J : (i + 1) * J])
        estimates[point] = JKEstimate(
            repetition_estimates=reps, J=J, K=K, seed_path=seed_path
        )
    best = max(e.mean for e in estimates.values())
    tied = [p for p in points if estimates[p].mean == best]
    chosen = tie_break(tied, grid.axis_names())
    return TuningResult(
        chosen=chosen,
        estimates=estimates,
        chosen_estimate=estimates[chosen].mean,
        J=J,
        K=K,
        seed_path=seed_path,
        degenerate=all(e.degenerate for e in estimates.values()),
    )
