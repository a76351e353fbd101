"""J-K-fold cross validation: stable estimation, tuning, and variability
meta-experiments."""

from .core import (
    ACCURACY,
    Dataset,
    Metric,
    RunConfig,
    SeedPath,
    accuracy,
    derive_seed,
)
from .estimate import (
    CVEstimate,
    JKEstimate,
    global_score,
    holdout_estimate,
    jkfold_estimate,
    kfold_estimate,
)
from .learners import LearnerSpec, fit, predict
from .meta import (
    BudgetComparison,
    MetaEstimation,
    MetaReport,
    compare_budgets,
    run_meta_estimation,
    run_meta_tuning,
    variance_curve,
)
from .partition import (
    FoldAssignment,
    HoldoutSplit,
    make_holdout,
    make_kfold,
    make_stratified_kfold,
)
from .synth import generate_synthetic
from .textfeat import (
    Corpus,
    Vocabulary,
    build_vocabulary,
    read_delimited_corpus,
    read_directory_corpus,
    vectorize,
)
from .tune import ParamGrid, ParamPoint, TuningResult, grid_tune, tie_break

__version__ = "0.1.0"

__all__ = [
    "ACCURACY",
    "BudgetComparison",
    "CVEstimate",
    "Corpus",
    "Dataset",
    "FoldAssignment",
    "HoldoutSplit",
    "JKEstimate",
    "LearnerSpec",
    "MetaEstimation",
    "MetaReport",
    "Metric",
    "ParamGrid",
    "ParamPoint",
    "RunConfig",
    "SeedPath",
    "TuningResult",
    "Vocabulary",
    "accuracy",
    "build_vocabulary",
    "compare_budgets",
    "derive_seed",
    "fit",
    "generate_synthetic",
    "global_score",
    "grid_tune",
    "holdout_estimate",
    "jkfold_estimate",
    "kfold_estimate",
    "make_holdout",
    "make_kfold",
    "make_stratified_kfold",
    "predict",
    "read_delimited_corpus",
    "read_directory_corpus",
    "run_meta_estimation",
    "run_meta_tuning",
    "tie_break",
    "variance_curve",
    "vectorize",
]
