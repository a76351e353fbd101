"""Config-driven command line front end.

Reads a flat key=value config file describing one experiment, runs the
named pipeline, and writes a report bundle (summary, per-replicate
records, histogram data, resolved config echo) as CSV or JSON. Output is
byte-identical for any worker count.

Config grammar: one ``key = value`` per line, ``#`` starts a comment,
blank lines ignored. See the README for the full key reference.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ACCURACY, Dataset, Metric, SeedPath, TAG_DATA, derive_seed
from .estimate import jkfold_estimate
from .learners import LearnerSpec
from .meta import (
    MetaReport,
    compare_budgets,
    run_meta_estimation,
    run_meta_tuning,
    variance_curve,
)
from .synth import generate_synthetic
from .textfeat import (
    Corpus,
    build_vocabulary,
    encode_labels,
    read_delimited_corpus,
    read_directory_corpus,
    vectorize,
)
from .tune import ParamGrid, grid_tune

COMMANDS = (
    "estimate",
    "tune",
    "meta-estimate",
    "meta-tune",
    "compare-budgets",
    "variance-curve",
)

ESTIMATE_HISTOGRAM_BINS = 20


class ConfigError(Exception):
    """Invalid configuration; the message names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse the flat key=value grammar, preserving key order."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}", f"expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}", "empty key")
        if key in out:
            raise ConfigError(key, "duplicate key")
        out[key] = value
    return out


def _parse_int(field_name: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(field_name, f"expected an integer, got {value!r}") from None


def _parse_float(field_name: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(field_name, f"expected a number, got {value!r}") from None


def _parse_bool(field_name: str, value: str) -> bool:
    if value.lower() == "true":
        return True
    if value.lower() == "false":
        return False
    raise ConfigError(field_name, f"expected true or false, got {value!r}")


def _parse_number(field_name: str, token: str):
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    return _parse_float(field_name, token)


def _parse_number_list(field_name: str, value: str) -> tuple:
    tokens = [t for t in value.split(",") if t.strip()]
    if not tokens:
        raise ConfigError(field_name, "expected a comma-separated list of numbers")
    return tuple(_parse_number(field_name, t) for t in tokens)


def _parse_budgets(field_name: str, value: str) -> tuple[tuple[int, int], ...]:
    configs = []
    for token in value.split(","):
        token = token.strip()
        if not token:
            continue
        parts = token.lower().split("x")
        if len(parts) != 2:
            raise ConfigError(field_name, f"expected JxK entries like 2x5, got {token!r}")
        configs.append((_parse_int(field_name, parts[0]), _parse_int(field_name, parts[1])))
    if not configs:
        raise ConfigError(field_name, "expected at least one JxK entry")
    return tuple(configs)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ",".join(_format_value(x) for x in v)
    return str(v)


_DATASET_KINDS = ("synthetic", "numeric-file", "text-file", "text-dir")

# per-command scheduling keys; common keys are handled unconditionally
_KEYS_BY_COMMAND = {
    "estimate": {"J", "K"},
    "tune": {"J", "K"},
    "meta-estimate": {"J", "K", "R"},
    "meta-tune": {"J", "K", "R"},
    "compare-budgets": {"R", "budgets"},
    "variance-curve": {"K", "R", "j_values"},
}
_GRID_COMMANDS = {"tune", "meta-tune", "compare-budgets"}
_HELDOUT_COMMANDS = {"meta-tune", "compare-budgets"}


@dataclass
class ExperimentConfig:
    """A fully resolved experiment definition."""

    command: str
    master_seed: int
    stratified: bool
    metric: Metric
    learner: LearnerSpec
    grid: ParamGrid | None
    J: int | None
    K: int | None
    R: int | None
    j_values: tuple[int, ...] | None
    budgets: tuple[tuple[int, int], ...] | None
    dataset: dict
    heldout: dict
    output_dir: str
    output_format: str
    resolved: dict[str, str] = field(default_factory=dict)


def resolve_config(kv: dict[str, str]) -> ExperimentConfig:
    """Validate raw key=value pairs into an ExperimentConfig."""
    kv = dict(kv)

    def take(key, default=None):
        return kv.pop(key, default)

    command = take("command")
    if command is None:
        raise ConfigError("command", "missing (one of %s)" % ", ".join(COMMANDS))
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")

    seed_raw = take("master_seed")
    if seed_raw is None:
        raise ConfigError("master_seed", "missing; seeds are never defaulted")
    master_seed = _parse_int("master_seed", seed_raw)

    stratified = _parse_bool("stratified", take("stratified", "false"))
    metric_kind = take("metric", "accuracy")
    try:
        metric = Metric(metric_kind)
    except ValueError as e:
        raise ConfigError("metric", str(e)) from None

    J = K = R = None
    j_values = budgets = None
    if "J" in _KEYS_BY_COMMAND[command]:
        raw = take("J")
        if raw is None:
            raise ConfigError("J", f"required by command {command!r}")
        J = _parse_int("J", raw)
    if "K" in _KEYS_BY_COMMAND[command]:
        raw = take("K")
        if raw is None:
            raise ConfigError("K", f"required by command {command!r}")
        K = _parse_int("K", raw)
    if "R" in _KEYS_BY_COMMAND[command]:
        R = _parse_int("R", take("R", "300"))
        if R < 2:
            raise ConfigError("R", f"need at least 2 replicates, got {R}")
    if "j_values" in _KEYS_BY_COMMAND[command]:
        raw = take("j_values")
        if raw is None:
            raise ConfigError("j_values", "required by variance-curve")
        j_values = tuple(_parse_int("j_values", t) for t in raw.split(",") if t.strip())
    if "budgets" in _KEYS_BY_COMMAND[command]:
        raw = take("budgets")
        if raw is None:
            raise ConfigError("budgets", "required by compare-budgets")
        budgets = _parse_budgets("budgets", raw)

    # dataset block
    kind = take("dataset.kind")
    if kind is None:
        raise ConfigError("dataset.kind", "missing (one of %s)" % ", ".join(_DATASET_KINDS))
    if kind not in _DATASET_KINDS:
        raise ConfigError("dataset.kind", f"unknown dataset kind {kind!r}")
    dataset: dict = {"kind": kind}
    if kind == "synthetic":
        for key, parser in (
            ("n", _parse_int),
            ("d", _parse_int),
            ("classes", _parse_int),
            ("separation", _parse_float),
            ("seed", _parse_int),
        ):
            raw = take(f"dataset.{key}")
            if raw is None:
                raise ConfigError(f"dataset.{key}", "required for synthetic datasets")
            dataset[key] = parser(f"dataset.{key}", raw)
    else:
        path = take("dataset.path")
        if path is None:
            raise ConfigError("dataset.path", f"required for {kind} datasets")
        if not Path(path).exists():
            raise ConfigError("dataset.path", f"file or directory not found: {path}")
        dataset["path"] = path
        if kind in ("numeric-file", "text-file"):
            default_delim = "," if kind == "numeric-file" else "tab"
            dataset["delimiter"] = take("dataset.delimiter", default_delim)
        if kind in ("text-file", "text-dir"):
            dataset["top_n"] = _parse_int("dataset.top_n", take("dataset.top_n", "300"))

    heldout: dict = {}
    h_n, h_frac = take("heldout.n"), take("heldout.fraction")
    if h_n is not None and h_frac is not None:
        raise ConfigError("heldout.n", "give heldout.n or heldout.fraction, not both")
    if h_n is not None:
        if kind != "synthetic":
            raise ConfigError("heldout.n", "only valid for synthetic datasets")
        heldout["n"] = _parse_int("heldout.n", h_n)
    if h_frac is not None:
        if kind == "synthetic":
            raise ConfigError("heldout.fraction", "use heldout.n for synthetic datasets")
        heldout["fraction"] = _parse_float("heldout.fraction", h_frac)
        raw = take("heldout.seed")
        if raw is None:
            raise ConfigError("heldout.seed", "required with heldout.fraction")
        heldout["seed"] = _parse_int("heldout.seed", raw)
    if heldout and command not in _HELDOUT_COMMANDS:
        raise ConfigError("heldout.n", f"held-out pool is not used by {command!r}")

    # learner block
    learner_kind = take("learner.kind")
    if learner_kind is None:
        raise ConfigError("learner.kind", "missing")
    fixed = {}
    for key in [k for k in kv if k.startswith("learner.")]:
        name = key[len("learner.") :]
        raw = kv.pop(key)
        fixed[name] = (
            _parse_bool(key, raw) if raw.lower() in ("true", "false") else _parse_number(key, raw)
        )
    try:
        learner = LearnerSpec.make(learner_kind, **fixed)
    except ValueError as e:
        raise ConfigError("learner", str(e)) from None

    # grid block (axis order follows key order in the file)
    axes = []
    for key in [k for k in kv if k.startswith("grid.")]:
        axes.append((key[len("grid.") :], _parse_number_list(key, kv.pop(key))))
    grid = None
    if axes:
        try:
            grid = ParamGrid(tuple(axes))
        except ValueError as e:
            raise ConfigError("grid", str(e)) from None
    needs_grid = command in _GRID_COMMANDS or (command == "variance-curve" and grid)
    if command in _GRID_COMMANDS and grid is None:
        raise ConfigError("grid", f"command {command!r} needs at least one grid.<axis> key")
    if grid is not None and command in ("estimate", "meta-estimate"):
        raise ConfigError("grid", f"command {command!r} does not tune; remove grid keys")
    slots = set(learner.tunable_slots())
    if needs_grid and grid is not None:
        axes_set = set(grid.axis_names())
        if axes_set != slots:
            raise ConfigError(
                "grid",
                f"grid axes {sorted(axes_set)} must match the learner's tunable "
                f"slots {sorted(slots)}",
            )
    elif slots:
        raise ConfigError(
            "learner", f"parameters {sorted(slots)} are neither fixed nor on a grid"
        )

    output_dir = take("output.dir", "report")
    output_format = take("output.format", "json")
    if output_format not in ("csv", "json"):
        raise ConfigError("output.format", f"expected csv or json, got {output_format!r}")

    if kv:
        raise ConfigError(sorted(kv)[0], f"unknown or unused key for {command!r}")

    cfg = ExperimentConfig(
        command=command,
        master_seed=master_seed,
        stratified=stratified,
        metric=metric,
        learner=learner,
        grid=grid,
        J=J,
        K=K,
        R=R,
        j_values=j_values,
        budgets=budgets,
        dataset=dataset,
        heldout=heldout,
        output_dir=output_dir,
        output_format=output_format,
    )
    cfg.resolved = _resolved_echo(cfg)
    return cfg


def _resolved_echo(cfg: ExperimentConfig) -> dict[str, str]:
    """The experiment definition as flat key=value pairs, canonical order.

    Output location/format and the worker count are delivery knobs, not
    part of the experiment's identity, so they are excluded: re-running
    this echo reproduces the report bytes exactly.
    """
    echo: dict[str, str] = {"command": cfg.command, "master_seed": str(cfg.master_seed)}
    for name, value in (("J", cfg.J), ("K", cfg.K), ("R", cfg.R)):
        if value is not None:
            echo[name] = str(value)
    if cfg.j_values is not None:
        echo["j_values"] = ",".join(str(j) for j in cfg.j_values)
    if cfg.budgets is not None:
        echo["budgets"] = ",".join(f"{j}x{k}" for j, k in cfg.budgets)
    echo["stratified"] = _format_value(cfg.stratified)
    echo["metric"] = cfg.metric.kind
    for key in ("kind", "path", "delimiter", "n", "d", "classes", "separation", "seed", "top_n"):
        if key in cfg.dataset:
            echo[f"dataset.{key}"] = _format_value(cfg.dataset[key])
    for key in ("n", "fraction", "seed"):
        if key in cfg.heldout:
            echo[f"heldout.{key}"] = _format_value(cfg.heldout[key])
    echo["learner.kind"] = cfg.learner.kind
    for name, value in cfg.learner.fixed_params:
        echo[f"learner.{name}"] = _format_value(value)
    if cfg.grid is not None:
        for name, values in cfg.grid.axes:
            echo[f"grid.{name}"] = _format_value(values)
    return echo


# ---------------------------------------------------------------------------
# dataset construction


def read_numeric_dataset(path: str | Path, delimiter: str = ",") -> Dataset:
    """Delimited numeric file with a header row; the ``label`` column holds
    class labels, every other column is a feature."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if "label" not in header:
        raise ValueError(f"{path}: header must contain a 'label' column")
    label_col = header.index("label")
    feature_cols = [i for i in range(len(header)) if i != label_col]
    if not feature_cols:
        raise ValueError(f"{path}: no feature columns")
    labels_raw, features = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} columns")
        labels_raw.append(row[label_col].strip())
        features.append([float(row[i]) for i in feature_cols])
    labels, _ = encode_labels(labels_raw)
    return Dataset(np.asarray(features), labels)


def _delimiter_of(raw: str) -> str:
    return "\t" if raw == "tab" else raw


def _split_corpus(corpus: Corpus, keep: np.ndarray) -> Corpus:
    docs = tuple(corpus.documents[i] for i in keep)
    return Corpus(docs, corpus.labels[keep], corpus.label_names)


def build_datasets(cfg: ExperimentConfig) -> tuple[Dataset, Dataset | None]:
    """Materialize the training pool and the optional held-out pool."""
    ds = cfg.dataset
    if ds["kind"] == "synthetic":
        data = generate_synthetic(ds["n"], ds["d"], ds["classes"], ds["separation"], ds["seed"])
        heldout = None
        if "n" in cfg.heldout:
            heldout = generate_synthetic(
                cfg.heldout["n"],
                ds["d"],
                ds["classes"],
                ds["separation"],
                derive_seed(ds["seed"], (TAG_DATA,)),
            )
        return data, heldout

    if ds["kind"] == "numeric-file":
        data = read_numeric_dataset(ds["path"], _delimiter_of(ds["delimiter"]))
        return _carve_heldout_rows(cfg, data)

    if ds["kind"] == "text-file":
        corpus = read_delimited_corpus(ds["path"], _delimiter_of(ds["delimiter"]))
    else:
        corpus = read_directory_corpus(ds["path"])
    if "fraction" in cfg.heldout:
        # vocabulary comes from the training side only, so the held-out
        # pool never leaks terms into feature selection
        from .partition import make_holdout

        split = make_holdout(len(corpus.documents), cfg.heldout["fraction"], cfg.heldout["seed"])
        train_corpus = _split_corpus(corpus, np.sort(split.train_idx))
        held_corpus = _split_corpus(corpus, np.sort(split.test_idx))
        vocab = build_vocabulary(train_corpus, ds["top_n"])
        return vectorize(train_corpus, vocab), vectorize(held_corpus, vocab)
    vocab = build_vocabulary(corpus, ds["top_n"])
    return vectorize(corpus, vocab), None


def _carve_heldout_rows(cfg: ExperimentConfig, data: Dataset) -> tuple[Dataset, Dataset | None]:
    if "fraction" not in cfg.heldout:
        return data, None
    from .partition import make_holdout

    split = make_holdout(data.n, cfg.heldout["fraction"], cfg.heldout["seed"])
    return data.subset(np.sort(split.train_idx)), data.subset(np.sort(split.test_idx))


# ---------------------------------------------------------------------------
# command execution


@dataclass
class ReportBundle:
    summary: dict | list[dict]
    record_columns: list[str]
    records: list[list]
    histogram_columns: list[str]
    histogram: list[list]


def _binned_histogram(values: list[float], bins: int) -> list[list]:
    lo, hi = min(values), max(values)
    if lo == hi:
        return [[lo, hi, len(values)]]
    edges = [lo + (hi - lo) * i / bins for i in range(bins + 1)]
    counts = [0] * bins
    for v in values:
        i = min(int((v - lo) / (hi - lo) * bins), bins - 1)
        counts[i] += 1
    return [[edges[i], edges[i + 1], counts[i]] for i in range(bins)]


def _meta_tune_rows(report: MetaReport, axes: tuple[str, ...], with_global: bool, prefix=()):
    rows = []
    for rec in report.records:
        row = list(prefix) + [rec.replicate]
        row += [rec.chosen[a] for a in axes]
        row.append(rec.chosen_estimate)
        if with_global:
            row.append(rec.global_score)
        row.append(rec.degenerate)
        rows.append(row)
    return rows


def _meta_tune_summary_fields(report: MetaReport, axes: tuple[str, ...], with_global: bool):
    out: dict = {}
    for a in axes:
        s = report.axis_summary(a)
        out[f"sd_chosen_{a}"] = s.sd
        out[f"min_chosen_{a}"] = s.lo
        out[f"max_chosen_{a}"] = s.hi
    out["mean_estimate"] = report.estimate_mean
    out["sd_estimate"] = report.estimate_sd
    if with_global:
        out["mean_global_score"] = report.global_mean
        out["sd_global_score"] = report.global_sd
    out["degenerate_replicates"] = sum(1 for r in report.records if r.degenerate)
    return out


def execute(cfg: ExperimentConfig, data: Dataset, heldout: Dataset | None, workers: int) -> ReportBundle:
    """Run the configured pipeline and shape its report tables."""
    root = SeedPath(cfg.master_seed)
    axes = cfg.grid.axis_names() if cfg.grid is not None else ()
    with_global = heldout is not None

    if cfg.command == "estimate":
        est = jkfold_estimate(
            data, cfg.learner, None, cfg.J, cfg.K, cfg.stratified, cfg.metric, root, workers
        )
        records = [
            [j, f, rep.fold_scores[f]]
            for j, rep in enumerate(est.repetition_estimates)
            for f in range(cfg.K)
        ]
        rep_means = [rep.mean for rep in est.repetition_estimates]
        from collections import Counter

        hist = [[v, c] for v, c in sorted(Counter(rep_means).items())]
        summary = {
            "mean": est.mean,
            "J": cfg.J,
            "K": cfg.K,
            "degenerate": est.degenerate,
        }
        return ReportBundle(summary, ["repetition", "fold", "score"], records, ["value", "count"], hist)

    if cfg.command == "tune":
        result = grid_tune(
            data, cfg.learner, cfg.grid, cfg.J, cfg.K, cfg.stratified, cfg.metric, root, workers
        )
        records, hist = [], []
        for point, est in result.estimates.items():
            values = [point[a] for a in axes]
            hist.append(values + [est.mean])
            for j, rep in enumerate(est.repetition_estimates):
                records.append(values + [j, rep.mean])
        summary = {f"chosen_{a}": result.chosen[a] for a in axes}
        summary["chosen_estimate"] = result.chosen_estimate
        summary["J"] = cfg.J
        summary["K"] = cfg.K
        summary["degenerate"] = result.degenerate
        return ReportBundle(
            summary,
            [*axes, "repetition", "mean"],
            records,
            [*axes, "estimate"],
            hist,
        )

    if cfg.command == "meta-estimate":
        result = run_meta_estimation(
            data, cfg.learner, None, cfg.J, cfg.K, cfg.stratified, cfg.R,
            cfg.master_seed, cfg.metric, workers,
        )
        summary = {"mean": result.mean, "sd": result.sd, "J": cfg.J, "K": cfg.K, "R": cfg.R}
        for level, value in result.quantiles:
            summary[f"q{level}"] = value
        records = [[r.replicate, r.estimate, r.degenerate] for r in result.records]
        hist = _binned_histogram(result.estimates(), ESTIMATE_HISTOGRAM_BINS)
        return ReportBundle(
            summary,
            ["replicate_id", "estimate", "degenerate_flag"],
            records,
            ["bin_lo", "bin_hi", "count"],
            hist,
        )

    if cfg.command == "meta-tune":
        report = run_meta_tuning(
            data, heldout, cfg.learner, cfg.grid, cfg.J, cfg.K, cfg.stratified,
            cfg.R, cfg.master_seed, cfg.metric, workers,
        )
        summary = {"J": cfg.J, "K": cfg.K, "R": cfg.R}
        summary.update(_meta_tune_summary_fields(report, axes, with_global))
        records = _meta_tune_rows(report, axes, with_global)
        hist = [
            [name, value, count]
            for name, axis_summary in report.axes
            for value, count in axis_summary.histogram
        ]
        columns = ["replicate_id", *(f"chosen_{a}" for a in axes), "chosen_estimate"]
        if with_global:
            columns.append("global_score")
        columns.append("degenerate_flag")
        return ReportBundle(summary, columns, records, ["axis", "value", "count"], hist)

    if cfg.command == "compare-budgets":
        comparison = compare_budgets(
            data, heldout, cfg.learner, cfg.grid, list(cfg.budgets), cfg.stratified,
            cfg.R, cfg.master_seed, cfg.metric, workers,
        )
        summary_rows, records, hist = [], [], []
        for row in comparison.rows:
            entry = {"J": row.J, "K": row.K, "budget": row.budget}
            entry.update(_meta_tune_summary_fields(row.report, axes, with_global))
            summary_rows.append(entry)
            records += _meta_tune_rows(row.report, axes, with_global, prefix=(row.J, row.K))
            for name, axis_summary in row.report.axes:
                hist += [[row.J, row.K, name, v, c] for v, c in axis_summary.histogram]
        columns = ["J", "K", "replicate_id", *(f"chosen_{a}" for a in axes), "chosen_estimate"]
        if with_global:
            columns.append("global_score")
        columns.append("degenerate_flag")
        return ReportBundle(summary_rows, columns, records, ["J", "K", "axis", "value", "count"], hist)

    # variance-curve; a missing grid means estimation mode (params all fixed)
    curve = variance_curve(
        data, cfg.learner, cfg.grid, cfg.K, list(cfg.j_values), cfg.stratified,
        cfg.R, cfg.master_seed, cfg.metric, workers,
    )
    summary_rows, records, hist = [], [], []
    for point in curve:
        entry: dict = {"J": point.J}
        if point.sd_chosen is not None:
            for name, sd in point.sd_chosen:
                entry[f"sd_chosen_{name}"] = sd
        entry["sd_estimate"] = point.sd_estimate
        entry["sd_estimate_scaled"] = point.sd_estimate * float(np.sqrt(point.J))
        summary_rows.append(entry)
        if point.tuning is not None:
            records += _meta_tune_rows(point.tuning, axes, False, prefix=(point.J,))
            for name, axis_summary in point.tuning.axes:
                hist += [[point.J, name, v, c] for v, c in axis_summary.histogram]
        else:
            records += [
                [point.J, r.replicate, r.estimate, r.degenerate]
                for r in point.estimation.records
            ]
            hist += [
                [point.J, *row]
                for row in _binned_histogram(point.estimation.estimates(), ESTIMATE_HISTOGRAM_BINS)
            ]
    if cfg.grid is not None:
        columns = ["J", "replicate_id", *(f"chosen_{a}" for a in axes), "chosen_estimate", "degenerate_flag"]
        hist_columns = ["J", "axis", "value", "count"]
    else:
        columns = ["J", "replicate_id", "estimate", "degenerate_flag"]
        hist_columns = ["J", "bin_lo", "bin_hi", "count"]
    return ReportBundle(summary_rows, columns, records, hist_columns, hist)


# ---------------------------------------------------------------------------
# report writing


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def _csv_text(columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _resolved_text(resolved: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in resolved.items())


def write_report(bundle: ReportBundle, cfg: ExperimentConfig, out_dir: Path, fmt: str) -> list[Path]:
    """Write the four report files; on failure remove anything written."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        texts: dict[str, str] = {"resolved.cfg": _resolved_text(cfg.resolved)}
        if fmt == "json":
            payload = {
                "command": cfg.command,
                "config": cfg.resolved,
                "summary": _deep_jsonable(bundle.summary),
            }
            texts["summary.json"] = json.dumps(payload, indent=2) + "\n"
            texts["records.json"] = json.dumps(
                [dict(zip(bundle.record_columns, map(_jsonable, row))) for row in bundle.records],
                indent=2,
            ) + "\n"
            texts["histogram.json"] = json.dumps(
                [dict(zip(bundle.histogram_columns, map(_jsonable, row))) for row in bundle.histogram],
                indent=2,
            ) + "\n"
        else:
            if isinstance(bundle.summary, list):
                columns = list(bundle.summary[0]) if bundle.summary else []
                rows = [[entry.get(c) for c in columns] for entry in bundle.summary]
                texts["summary.csv"] = _csv_text(columns, rows)
            else:
                rows = [["config." + k, v] for k, v in cfg.resolved.items()]
                rows += [[k, _cell(v)] for k, v in bundle.summary.items()]
                texts["summary.csv"] = _csv_text(["key", "value"], rows)
            texts["records.csv"] = _csv_text(bundle.record_columns, bundle.records)
            texts["histogram.csv"] = _csv_text(bundle.histogram_columns, bundle.histogram)
        for name, text in texts.items():
            path = out_dir / name
            path.write_text(text, encoding="utf-8")
            written.append(path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written


def _deep_jsonable(obj):
    if isinstance(obj, dict):
        return {k: _deep_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_deep_jsonable(v) for v in obj]
    return _jsonable(obj)


def _print_summary(bundle: ReportBundle) -> None:
    if isinstance(bundle.summary, list):
        if not bundle.summary:
            return
        columns = list(bundle.summary[0])
        widths = [
            max(len(str(c)), *(len(_cell(e.get(c))) for e in bundle.summary))
            for c in columns
        ]
        print("  ".join(c.ljust(w) for c, w in zip(columns, widths)))
        for entry in bundle.summary:
            print("  ".join(_cell(entry.get(c)).ljust(w) for c, w in zip(columns, widths)))
    else:
        width = max(len(k) for k in bundle.summary)
        for key, value in bundle.summary.items():
            print(f"{key.ljust(width)}  {_cell(value)}")


# ---------------------------------------------------------------------------
# entry point


def run(cfg: ExperimentConfig, workers: int = 1, out_dir: str | Path | None = None,
        fmt: str | None = None) -> list[Path]:
    """Execute a resolved config and write its report bundle."""
    data, heldout = build_datasets(cfg)
    bundle = execute(cfg, data, heldout, workers)
    paths = write_report(
        bundle, cfg, Path(out_dir or cfg.output_dir), fmt or cfg.output_format
    )
    _print_summary(bundle)
    return paths


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="jkcv",
        description="J-K-fold cross-validation experiments from a config file",
    )
    parser.add_argument("--config", required=True, help="path to a key=value config file")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel workers; 0 means all cores (default 1)")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="report format (overrides output.format)")
    parser.add_argument("--out", default=None, help="report directory (overrides output.dir)")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as e:
        print(f"config error: --config: {e}", file=sys.stderr)
        return 2
    try:
        cfg = resolve_config(parse_config_text(text, source=args.config))
        if args.workers < 0:
            raise ConfigError("--workers", "must be >= 0")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        paths = run(cfg, workers=args.workers, out_dir=args.out, fmt=args.format)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"report written to {paths[0].parent}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
