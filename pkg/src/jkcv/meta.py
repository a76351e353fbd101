"""Re-run estimation or tuning across many independent partition replicates.

This is the machinery that measures internal variability: how much a CV
estimate, or a tuned parameter choice, moves when nothing changes but the
random partitioning. Replicate r seeds its whole pipeline from the path
(r,), so replicates are independent, individually re-derivable, and the
full run is bit-identical for any worker count.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .core import ACCURACY, Dataset, Metric, SeedPath
from .estimate import global_score, jkfold_estimate
from .learners import LearnerSpec
from .parallel import ordered_map
from .tune import ParamGrid, ParamPoint, grid_tune


def sample_sd(values) -> float:
    """Unbiased (n-1) sample standard deviation, plain summation so tests
    can recompute it exactly."""
    n = len(values)
    if n < 2:
        raise ValueError("sample SD needs at least two values")
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


@dataclass(frozen=True)
class AxisSummary:
    """Distribution of one tuned axis across replicates."""

    sd: float
    lo: float
    hi: float
    histogram: tuple[tuple[float | int, int], ...]  # (value, count), value asc


@dataclass(frozen=True)
class ReplicateRecord:
    replicate: int
    chosen: ParamPoint
    chosen_estimate: float
    global_score: float | None
    degenerate: bool


@dataclass(frozen=True)
class MetaReport:
    """Per-replicate tuning outcomes plus exact summary statistics."""

    records: tuple[ReplicateRecord, ...]
    axes: tuple[tuple[str, AxisSummary], ...]
    estimate_mean: float
    estimate_sd: float
    global_mean: float | None
    global_sd: float | None
    config: tuple[tuple[str, object], ...]

    def axis_summary(self, name: str) -> AxisSummary:
        for axis, summary in self.axes:
            if axis == name:
                return summary
        raise KeyError(name)

    def chosen_values(self, name: str) -> list:
        return [rec.chosen[name] for rec in self.records]


def _config_echo(spec: LearnerSpec, J, K, stratified, R, master_seed, metric, grid=None):
    echo = [
        ("J", J),
        ("K", K),
        ("R", R),
        ("stratified", stratified),
        ("master_seed", master_seed),
        ("metric", metric.kind),
        ("learner", spec.kind),
        ("fixed_params", spec.fixed_params),
    ]
    if grid is not None:
        echo.append(("grid", grid.axes))
    return tuple(echo)


def _tune_replicate(args):
    data, spec, grid, J, K, stratified, metric, master_seed, r = args
    result = grid_tune(
        data, spec, grid, J, K, stratified, metric, SeedPath(master_seed, (r,))
    )
    return result.chosen, result.chosen_estimate, result.degenerate


def run_meta_tuning(
    data: Dataset,
    heldout: Dataset | None,
    spec: LearnerSpec,
    grid: ParamGrid,
    J: int,
    K: int,
    stratified: bool,
    R: int,
    master_seed: int,
    metric: Metric = ACCURACY,
    workers: int = 1,
) -> MetaReport:
    """Tune R times under fresh partition replicates and summarize.

    When a held-out pool is given, the tuned model of each replicate also
    gets a global score; it depends only on the chosen point and a fixed
    fit seed, so it is computed once per distinct point and cached.
    """
    if R < 2:
        raise ValueError(f"need R >= 2 replicates for an SD, got {R}")
    units = [
        (data, spec, grid, J, K, stratified, metric, master_seed, r)
        for r in range(R)
    ]
    outcomes = ordered_map(_tune_replicate, units, workers)
    scores: dict[ParamPoint, float] = {}
    if heldout is not None:
        for chosen, _, _ in outcomes:
            if chosen not in scores:
                scores[chosen] = global_score(
                    data, heldout, spec, chosen, metric, SeedPath(master_seed)
                )
    records = tuple(
        ReplicateRecord(
            replicate=r,
            chosen=chosen,
            chosen_estimate=estimate,
            global_score=scores.get(chosen) if heldout is not None else None,
            degenerate=degenerate,
        )
        for r, (chosen, estimate, degenerate) in enumerate(outcomes)
    )
    axes = []
    for name in grid.axis_names():
        values = [rec.chosen[name] for rec in records]
        hist = tuple(sorted(Counter(values).items()))
        axes.append(
            (name, AxisSummary(sample_sd(values), min(values), max(values), hist))
        )
    estimates = [rec.chosen_estimate for rec in records]
    gvals = [rec.global_score for rec in records] if heldout is not None else None
    return MetaReport(
        records=records,
        axes=tuple(axes),
        estimate_mean=sum(estimates) / R,
        estimate_sd=sample_sd(estimates),
        global_mean=sum(gvals) / R if gvals else None,
        global_sd=sample_sd(gvals) if gvals else None,
        config=_config_echo(spec, J, K, stratified, R, master_seed, metric, grid),
    )


@dataclass(frozen=True)
class EstimationRecord:
    replicate: int
    estimate: float
    degenerate: bool


QUANTILE_LEVELS = (0.0, 0.025, 0.25, 0.5, 0.75, 0.975, 1.0)


@dataclass(frozen=True)
class MetaEstimation:
    """Distribution of the J-K-fold estimate across partition replicates."""

    records: tuple[EstimationRecord, ...]
    mean: float
    sd: float
    quantiles: tuple[tuple[float, float], ...]
    config: tuple[tuple[str, object], ...]

    def estimates(self) -> list[float]:
        return [rec.estimate for rec in self.records]


def _estimate_replicate(args):
    data, spec, params, J, K, stratified, metric, master_seed, r = args
    est = jkfold_estimate(
        data, spec, params, J, K, stratified, metric, SeedPath(master_seed, (r,))
    )
    return est.mean, est.degenerate


def run_meta_estimation(
    data: Dataset,
    spec: LearnerSpec,
    params,
    J: int,
    K: int,
    stratified: bool,
    R: int,
    master_seed: int,
    metric: Metric = ACCURACY,
    workers: int = 1,
) -> MetaEstimation:
    """Distribution of the J-K-fold estimate over R partition replicates."""
    if R < 2:
        raise ValueError(f"need R >= 2 replicates for an SD, got {R}")
    units = [
        (data, spec, params, J, K, stratified, metric, master_seed, r)
        for r in range(R)
    ]
    outcomes = ordered_map(_estimate_replicate, units, workers)
    records = tuple(
        EstimationRecord(r, mean, degenerate)
        for r, (mean, degenerate) in enumerate(outcomes)
    )
    values = [rec.estimate for rec in records]
    ordered = sorted(values)
    quantiles = tuple(
        (level, _quantile(ordered, level)) for level in QUANTILE_LEVELS
    )
    return MetaEstimation(
        records=records,
        mean=sum(values) / R,
        sd=sample_sd(values),
        quantiles=quantiles,
        config=_config_echo(spec, J, K, stratified, R, master_seed, metric),
    )


def _quantile(ordered: list[float], level: float) -> float:
    """Linear-interpolation quantile of pre-sorted values."""
    pos = level * (len(ordered) - 1)
    lo = int(math.floor(pos))
    hi = int(math.ceil(pos))
    if lo == hi:
        return ordered[lo]
    frac = pos - lo
    return ordered[lo] * (1.0 - frac) + ordered[hi] * frac


@dataclass(frozen=True)
class BudgetRow:
    J: int
    K: int
    budget: int
    report: MetaReport


@dataclass(frozen=True)
class BudgetComparison:
    """Meta-tuning reports for several (J, K) choices, grouped by cost J*K."""

    rows: tuple[BudgetRow, ...]

    def groups(self) -> dict[int, tuple[BudgetRow, ...]]:
        out: dict[int, list[BudgetRow]] = {}
        for row in self.rows:
            out.setdefault(row.budget, []).append(row)
        return {b: tuple(rows) for b, rows in out.items()}


def compare_budgets(
    data: Dataset,
    heldout: Dataset | None,
    spec: LearnerSpec,
    grid: ParamGrid,
    configs: list[tuple[int, int]],
    stratified: bool,
    R: int,
    master_seed: int,
    metric: Metric = ACCURACY,
    workers: int = 1,
) -> BudgetComparison:
    """One meta-tuning run per (J, K), same replicate seed family for all.

    Rows are stably ordered by budget J*K, so equal-cost configurations sit
    next to each other as in the equal-budget tables.
    """
    if not configs:
        raise ValueError("need at least one (J, K) configuration")
    rows = []
    for J, K in configs:
        report = run_meta_tuning(
            data, heldout, spec, grid, J, K, stratified, R, master_seed, metric, workers
        )
        rows.append(BudgetRow(J=J, K=K, budget=J * K, report=report))
    rows.sort(key=lambda row: row.budget)  # stable: input order within a group
    return BudgetComparison(rows=tuple(rows))


@dataclass(frozen=True)
class VariancePoint:
    """One J on the diminishing-returns curve."""

    J: int
    sd_chosen: tuple[tuple[str, float], ...] | None
    sd_estimate: float
    tuning: MetaReport | None = None
    estimation: MetaEstimation | None = None


def variance_curve(
    data: Dataset,
    spec: LearnerSpec,
    grid_or_params,
    K: int,
    J_values: list[int],
    stratified: bool,
    R: int,
    master_seed: int,
    metric: Metric = ACCURACY,
    workers: int = 1,
) -> tuple[VariancePoint, ...]:
    """SD of the tuned choice and of the estimate as J grows, fixed K.

    ``grid_or_params`` selects the mode: a ParamGrid means each J runs a
    full meta-tuning; a parameter mapping means meta-estimation only.
    """
    if not J_values:
        raise ValueError("J_values must be nonempty")
    if list(J_values) != sorted(J_values) or len(set(J_values)) != len(J_values):
        raise ValueError(f"J_values must be strictly ascending, got {J_values}")
    points = []
    for J in J_values:
        if isinstance(grid_or_params, ParamGrid):
            report = run_meta_tuning(
                data, None, spec, grid_or_params, J, K, stratified, R,
                master_seed, metric, workers,
            )
            sd_chosen = tuple((name, s.sd) for name, s in report.axes)
            points.append(
                VariancePoint(J, sd_chosen, report.estimate_sd, tuning=report)
            )
        else:
            result = run_meta_estimation(
                data, spec, grid_or_params, J, K, stratified, R,
                master_seed, metric, workers,
            )
            points.append(VariancePoint(J, None, result.sd, estimation=result))
    return tuple(points)
