"""Built-in classifiers: L2 logistic regression, a small random forest, knn.

All three are deterministic functions of (training subset, parameters,
seed). Ties are broken totally so predictions are platform-independent:
vote ties go to the lowest label id, distance ties to the lowest record
index, multiclass score ties to the lowest class id.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import Dataset, derive_seed, rng_from_seed

# Gradient-descent loop bounds for logistic_l2. Convergence is declared on
# the full objective gradient norm (weights and intercept).
GD_MAX_ITER = 5000
GD_TOL = 1e-6


def _positive_float(v) -> float:
    v = float(v)
    if not np.isfinite(v) or v <= 0:
        raise ValueError(f"must be a positive finite number, got {v}")
    return v


def _fraction(v) -> float:
    v = float(v)
    if not 0 < v <= 1:
        raise ValueError(f"must lie in (0, 1], got {v}")
    return v


def _int_at_least(lo: int):
    def check(v) -> int:
        i = int(v)
        if i != v or i < lo:
            raise ValueError(f"must be an integer >= {lo}, got {v}")
        return i

    return check


def _odd_int(v) -> int:
    i = int(v)
    if i != v or i < 1 or i % 2 == 0:
        raise ValueError(f"must be an odd integer >= 1, got {v}")
    return i


def _bool(v) -> bool:
    if not isinstance(v, (bool, np.bool_)):
        raise ValueError(f"must be a boolean, got {v!r}")
    return bool(v)


# Parameter schema per learner kind. "bootstrap" is a test hook: disabling
# it makes a 1-tree forest a plain decision tree.
_SCHEMAS = {
    "logistic_l2": {"C": _positive_float},
    "forest_lite": {
        "trees": _int_at_least(1),
        "max_depth": _int_at_least(1),
        "max_features": _fraction,
        "bootstrap": _bool,
    },
    "knn": {"k": _odd_int},
}
_REQUIRED = {
    "logistic_l2": ("C",),
    "forest_lite": ("trees", "max_depth", "max_features"),
    "knn": ("k",),
}
_DEFAULTS = {"forest_lite": {"bootstrap": True}}


@dataclass(frozen=True)
class LearnerSpec:
    """A learner kind plus its fixed hyperparameters.

    Parameters left out of ``fixed_params`` are tunable slots and must be
    supplied per grid point at fit time.
    """

    kind: str
    fixed_params: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in _SCHEMAS:
            raise ValueError(f"unknown learner kind {self.kind!r}")
        items = dict(self.fixed_params)
        schema = _SCHEMAS[self.kind]
        checked = []
        for name in sorted(items):
            if name not in schema:
                raise ValueError(f"unknown parameter {name!r} for {self.kind}")
            checked.append((name, schema[name](items[name])))
        object.__setattr__(self, "fixed_params", tuple(checked))

    @classmethod
    def make(cls, kind: str, **fixed) -> "LearnerSpec":
        return cls(kind, tuple(fixed.items()))

    def fixed(self) -> dict:
        return dict(self.fixed_params)

    def tunable_slots(self) -> tuple[str, ...]:
        fixed = self.fixed()
        return tuple(p for p in _REQUIRED[self.kind] if p not in fixed)


def _resolve_params(spec: LearnerSpec, params) -> dict:
    if params is None:
        point = {}
    elif hasattr(params, "as_dict"):
        point = params.as_dict()
    else:
        point = dict(params)
    fixed = spec.fixed()
    schema = _SCHEMAS[spec.kind]
    merged = dict(_DEFAULTS.get(spec.kind, {}))
    merged.update(fixed)
    for name, value in point.items():
        if name not in schema:
            raise ValueError(f"unknown parameter {name!r} for {spec.kind}")
        if name in fixed:
            raise ValueError(f"parameter {name!r} is fixed by the spec and tuned")
        merged[name] = schema[name](value)
    missing = [p for p in _REQUIRED[spec.kind] if p not in merged]
    if missing:
        raise ValueError(f"missing parameter(s) for {spec.kind}: {missing}")
    return merged


# ---------------------------------------------------------------------------
# logistic_l2


@dataclass(frozen=True)
class LogisticModel:
    """One weight row per decision score: a single row for binary problems,
    one row per seen class (one-vs-rest) otherwise."""

    classes: np.ndarray
    weights: np.ndarray
    intercepts: np.ndarray
    n_features: int
    iterations: int
    converged: bool


@dataclass(frozen=True)
class ConstantModel:
    """Fallback when training data contains a single class."""

    label: int
    n_features: int


def _logistic_objective(wb: np.ndarray, Xb: np.ndarray, target: np.ndarray, C: float) -> float:
    """Mean cross-entropy plus (1/2C)||w||^2; intercept is the last slot
    and is not penalized."""
    z = Xb @ wb
    ce = float(np.mean(np.logaddexp(0.0, z) - target * z))
    return ce + float(wb[:-1] @ wb[:-1]) / (2.0 * C)


def _logistic_gradient(wb: np.ndarray, Xb: np.ndarray, target: np.ndarray, C: float) -> np.ndarray:
    z = Xb @ wb
    p = 0.5 * (1.0 + np.tanh(0.5 * z))  # sigmoid, overflow-safe
    g = Xb.T @ (p - target) / Xb.shape[0]
    g[:-1] += wb[:-1] / C
    return g


def _gd_minimize(Xb: np.ndarray, target: np.ndarray, C: float, L_data: float):
    """Batch gradient descent with fixed per-block steps.

    The Hessian is bounded by L_data * I plus the penalty diagonal, so the
    weight block takes steps 1/(L_data + 1/C) and the unpenalized intercept
    1/L_data. Stops when the gradient norm falls below GD_TOL.
    """
    dim = Xb.shape[1]
    step = np.full(dim, 1.0 / (L_data + 1.0 / C))
    step[-1] = 1.0 / L_data
    wb = np.zeros(dim)
    for it in range(GD_MAX_ITER):
        g = _logistic_gradient(wb, Xb, target, C)
        if np.sqrt(g @ g) <= GD_TOL:
            return wb, it, True
        wb -= step * g
    return wb, GD_MAX_ITER, False


def _fit_logistic(train: Dataset, C: float) -> LogisticModel | ConstantModel:
    classes = np.unique(train.labels)
    if classes.shape[0] == 1:
        return ConstantModel(label=int(classes[0]), n_features=train.d)
    n = train.n
    Xb = np.hstack([train.features, np.ones((n, 1))])
    # Largest Hessian eigenvalue of the mean cross-entropy is at most
    # sigma_max(Xb)^2 / (4n); the intercept column keeps this > 0.
    gram = Xb.T @ Xb
    L_data = float(np.linalg.eigvalsh(gram)[-1]) / (4.0 * n)
    if classes.shape[0] == 2:
        target = (train.labels == classes[1]).astype(np.float64)
        wb, iters, conv = _gd_minimize(Xb, target, C, L_data)
        weights = wb[:-1][None, :]
        intercepts = np.array([wb[-1]])
        return LogisticModel(classes, weights, intercepts, train.d, iters, conv)
    rows, icpts, iters, conv = [], [], 0, True
    for c in classes:
        target = (train.labels == c).astype(np.float64)
        wb, it, ok = _gd_minimize(Xb, target, C, L_data)
        rows.append(wb[:-1])
        icpts.append(wb[-1])
        iters = max(iters, it)
        conv = conv and ok
    return LogisticModel(
        classes, np.vstack(rows), np.asarray(icpts), train.d, iters, conv
    )


def _predict_logistic(model: LogisticModel, X: np.ndarray) -> np.ndarray:
    scores = X @ model.weights.T + model.intercepts
    if model.classes.shape[0] == 2:
        # sigmoid(z) >= 0.5 exactly when z >= 0
        positive = scores[:, 0] >= 0.0
        return np.where(positive, model.classes[1], model.classes[0])
    # argmax returns the first maximum; classes ascend, so score ties go to
    # the lowest class id
    return model.classes[np.argmax(scores, axis=1)]


# ---------------------------------------------------------------------------
# forest_lite


@dataclass(frozen=True)
class _Leaf:
    label: int


@dataclass(frozen=True)
class _Split:
    feature: int
    threshold: float
    left: "_Split | _Leaf"
    right: "_Split | _Leaf"


@dataclass(frozen=True)
class ForestModel:
    trees: tuple
    class_count: int
    n_features: int


def _majority_label(y: np.ndarray, class_count: int) -> int:
    counts = np.bincount(y, minlength=class_count)
    return int(np.argmax(counts))  # first max = lowest label id


def _best_gini_split(X: np.ndarray, y: np.ndarray, feats: np.ndarray, class_count: int):
    """Scan candidate (feature, threshold) pairs in (feature asc, threshold
    asc) order; return the strictly best weighted child Gini, or None when
    no feature admits a split."""
    n = y.shape[0]
    onehot = np.zeros((n, class_count))
    onehot[np.arange(n), y] = 1.0
    best_score, best = np.inf, None
    for f in feats:
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        cs = col[order]
        change = np.flatnonzero(cs[1:] > cs[:-1])
        if change.shape[0] == 0:
            continue
        thr = 0.5 * (cs[change] + cs[change + 1])
        # guard against midpoints that round down onto the left value
        ok = thr > cs[change]
        if not ok.all():
            change, thr = change[ok], thr[ok]
            if change.shape[0] == 0:
                continue
        pref = np.cumsum(onehot[order], axis=0)
        left = pref[change]
        n_left = (change + 1).astype(np.float64)
        right = pref[-1] - left
        n_right = n - n_left
        gini_left = 1.0 - np.sum((left / n_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right / n_right[:, None]) ** 2, axis=1)
        score = (n_left * gini_left + n_right * gini_right) / n
        i = int(np.argmin(score))  # first min = smallest threshold
        if score[i] < best_score:
            best_score = float(score[i])
            best = (int(f), float(thr[i]))
    return best


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    depth: int,
    max_depth: int,
    m_features: int,
    class_count: int,
    rng: np.random.Generator,
):
    counts = np.bincount(y, minlength=class_count)
    if depth >= max_depth or counts.max() == y.shape[0] or y.shape[0] < 2:
        return _Leaf(int(np.argmax(counts)))
    feats = np.sort(rng.choice(X.shape[1], size=m_features, replace=False))
    found = _best_gini_split(X, y, feats, class_count)
    if found is None:
        return _Leaf(int(np.argmax(counts)))
    f, thr = found
    mask = X[:, f] < thr
    left = _grow_tree(X[mask], y[mask], depth + 1, max_depth, m_features, class_count, rng)
    right = _grow_tree(X[~mask], y[~mask], depth + 1, max_depth, m_features, class_count, rng)
    return _Split(f, thr, left, right)


def split_feature_count(max_features: float, d: int) -> int:
    """Number of feature columns examined at each split: ceil(fraction*d),
    at least 1."""
    return max(1, min(d, int(np.ceil(max_features * d))))


def _fit_forest(train: Dataset, params: dict, seed: int) -> ForestModel:
    n, d = train.n, train.d
    m = split_feature_count(params["max_features"], d)
    trees = []
    for t in range(params["trees"]):
        rng = rng_from_seed(derive_seed(seed, (t,)))
        if params["bootstrap"]:
            idx = rng.integers(0, n, size=n)
            Xt, yt = train.features[idx], train.labels[idx]
        else:
            Xt, yt = train.features, train.labels
        trees.append(
            _grow_tree(Xt, yt, 0, params["max_depth"], m, train.class_count, rng)
        )
    return ForestModel(tuple(trees), train.class_count, d)


def _tree_predict(node, X: np.ndarray, out: np.ndarray, idx: np.ndarray) -> None:
    if isinstance(node, _Leaf):
        out[idx] = node.label
        return
    mask = X[idx, node.feature] < node.threshold
    _tree_predict(node.left, X, out, idx[mask])
    _tree_predict(node.right, X, out, idx[~mask])


def _predict_forest(model: ForestModel, X: np.ndarray) -> np.ndarray:
    votes = np.zeros((X.shape[0], model.class_count), dtype=np.int64)
    out = np.empty(X.shape[0], dtype=np.int64)
    idx = np.arange(X.shape[0])
    for tree in model.trees:
        _tree_predict(tree, X, out, idx)
        votes[idx, out] += 1
    return np.argmax(votes, axis=1)  # vote ties -> lowest label id


# ---------------------------------------------------------------------------
# knn


@dataclass(frozen=True)
class KnnModel:
    features: np.ndarray
    labels: np.ndarray
    k: int
    class_count: int
    n_features: int


def _fit_knn(train: Dataset, k: int) -> KnnModel:
    if k > train.n:
        raise ValueError(f"k={k} exceeds training size {train.n}")
    return KnnModel(train.features, train.labels, k, train.class_count, train.d)


def _predict_knn(model: KnnModel, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0], dtype=np.int64)
    # chunked so a big query block never materializes n_q * n_train * d
    chunk = max(1, 2_000_000 // max(1, model.features.shape[0] * model.n_features))
    for start in range(0, X.shape[0], chunk):
        q = X[start : start + chunk]
        d2 = ((q[:, None, :] - model.features[None, :, :]) ** 2).sum(axis=2)
        # stable sort: equal distances resolve to the lowest record index
        nearest = np.argsort(d2, axis=1, kind="stable")[:, : model.k]
        votes = np.zeros((q.shape[0], model.class_count), dtype=np.int64)
        rows = np.repeat(np.arange(q.shape[0]), model.k)
        np.add.at(votes, (rows, model.labels[nearest].ravel()), 1)
        out[start : start + chunk] = np.argmax(votes, axis=1)
    return out


# ---------------------------------------------------------------------------
# public entry points


def fit(spec: LearnerSpec, params, train: Dataset, seed: int):
    """Train one model on ``train``. Stochastic learners draw all their
    randomness from ``seed``; logistic_l2 and knn ignore it."""
    merged = _resolve_params(spec, params)
    if train.n < 1:
        raise ValueError("training set is empty")
    if not np.isfinite(train.features).all():
        raise ValueError("training features contain non-finite values")
    if spec.kind == "logistic_l2":
        return _fit_logistic(train, merged["C"])
    if spec.kind == "forest_lite":
        return _fit_forest(train, merged, seed)
    return _fit_knn(train, merged["k"])


def predict(model, features: np.ndarray) -> np.ndarray:
    """Predicted labels for a query matrix; width must match training."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"query width {X.shape[1] if X.ndim == 2 else X.shape} does not "
            f"match training width {model.n_features}"
        )
    if isinstance(model, ConstantModel):
        return np.full(X.shape[0], model.label, dtype=np.int64)
    if isinstance(model, LogisticModel):
        return _predict_logistic(model, X)
    if isinstance(model, ForestModel):
        return _predict_forest(model, X)
    if isinstance(model, KnnModel):
        return _predict_knn(model, X)
    raise TypeError(f"unknown model type {type(model).__name__}")
