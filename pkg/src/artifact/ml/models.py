"""From-scratch regressors and binary classifiers.

Every learner is fitted through :func:`fit_regressor` or
:func:`fit_classifier` and returns a :class:`FittedModel` whose ``params``
hold only JSON-native values, so ``FittedModel.from_json(m.to_json())``
reproduces ``m`` exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, LabelError, NumericError, ParameterError, ShapeError
from .trees import apply_tree, build_tree, predict_tree

REGRESSORS = ("ols", "knn", "tree", "random_forest", "gradient_boost")
CLASSIFIERS = ("gaussian_nb", "logistic", "knn", "tree", "random_forest", "gradient_boost")

DEFAULTS = {
    "ols": {"ridge_fallback": True, "ridge": 1e-8},
    "knn": {"k": 5},
    "tree": {"max_depth": 8, "min_samples_leaf": 1},
    "random_forest": {"n_trees": 100, "max_depth": 8, "min_samples_leaf": 1, "max_features": "sqrt"},
    "gradient_boost": {"n_rounds": 100, "learning_rate": 0.1, "max_depth": 3, "min_samples_leaf": 1},
    "gaussian_nb": {"var_floor": 1e-9},
    "logistic": {"n_iter": 500, "learning_rate": 0.1, "tol": 1e-8},
}

COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.array(self.targets, dtype=float).ravel()
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or len(X) != len(y):
            raise ShapeError(f"features {X.shape} do not match {len(y)} targets")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DataError("dataset contains non-finite values")
        names = tuple(self.feature_names) or tuple(f"x{i}" for i in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ShapeError(f"{len(names)} feature names for {X.shape[1]} columns")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "feature_names", names)

    @classmethod
    def from_feature_matrix(cls, fm) -> "Dataset":
        return cls(fm.rows, fm.labels, fm.feature_names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]


@dataclass(eq=False)
class FittedModel:
    kind: str
    task: str
    hyperparameters: dict
    seed: int | None
    n_features: int
    params: dict = field(repr=False)
    feature_names: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "task": self.task,
            "hyperparameters": self.hyperparameters,
            "seed": self.seed,
            "n_features": self.n_features,
            "feature_names": list(self.feature_names),
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "FittedModel":
        return cls(
            doc["kind"],
            doc["task"],
            dict(doc["hyperparameters"]),
            doc["seed"],
            int(doc["n_features"]),
            doc["params"],
            tuple(doc.get("feature_names", ())),
        )

    @classmethod
    def from_json(cls, text: str) -> "FittedModel":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, FittedModel):
            return NotImplemented
        return self.to_json() == other.to_json()


def _listify(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def _hyper(kind, given):
    hp = dict(DEFAULTS[kind])
    unknown = set(given or {}) - set(hp)
    if unknown:
        raise ParameterError(f"unknown hyperparameters for {kind}: {sorted(unknown)}")
    hp.update(given or {})
    return hp


def _zscore_fit(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return mu, sd


def _check_width(model, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1) if model.n_features > 1 else X.reshape(-1, 1)
    if X.shape[1] != model.n_features:
        raise ShapeError(f"model expects {model.n_features} features, got {X.shape[1]}")
    return X


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _max_features(spec, p):
    if spec in (None, "all"):
        return p
    if spec == "sqrt":
        return max(1, int(math.sqrt(p)))
    if isinstance(spec, float):
        return max(1, int(spec * p))
    return max(1, min(int(spec), p))


def _tree_seeds(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


# --------------------------------------------------------------------------
# fitting

def _fit_ols(X, y, hp):
    n, p = X.shape
    A = np.column_stack([np.ones(n), X])
    gram = A.T @ A
    rhs = A.T @ y
    ridge_used = 0.0
    singular = n <= p or not np.isfinite(np.linalg.cond(gram)) or np.linalg.cond(gram) > COND_LIMIT
    if singular:
        if not hp["ridge_fallback"]:
            raise NumericError("normal equations are singular; enable ridge_fallback")
        ridge_used = hp["ridge"] * max(1.0, np.trace(gram) / len(gram))
        penalty = np.eye(p + 1) * ridge_used
        penalty[0, 0] = 0.0
        gram = gram + penalty
    beta = np.linalg.solve(gram, rhs)
    return {"intercept": float(beta[0]), "coefficients": _listify(beta[1:]), "ridge": ridge_used}


def _fit_knn(X, y, hp):
    if not 1 <= hp["k"] <= len(y):
        raise ParameterError(f"k must be in [1, {len(y)}], got {hp['k']}")
    mu, sd = _zscore_fit(X)
    return {"mean": _listify(mu), "scale": _listify(sd), "X": X.tolist(), "y": _listify(y)}


def _fit_forest(X, y, hp, criterion, seed):
    p = X.shape[1]
    m = _max_features(hp["max_features"], p)
    trees = []
    for rng in _tree_seeds(seed, hp["n_trees"]):
        idx = rng.integers(0, len(y), size=len(y))
        trees.append(build_tree(X[idx], y[idx], criterion, hp["max_depth"], hp["min_samples_leaf"], m, rng))
    return {"trees": trees}


def _fit_boost(X, y, hp, task):
    eta = hp["learning_rate"]
    if task == "regression":
        base = float(y.mean())
        F = np.full(len(y), base)
        trees = []
        for _ in range(hp["n_rounds"]):
            tree = build_tree(X, y - F, "mse", hp["max_depth"], hp["min_samples_leaf"])
            F = F + eta * predict_tree(tree, X)
            trees.append(tree)
        return {"base": base, "trees": trees}

    # log-loss: regression trees on the gradient, Newton step per leaf
    prior = float(np.clip(y.mean(), 1e-12, 1 - 1e-12))
    base = math.log(prior / (1 - prior))
    F = np.full(len(y), base)
    trees = []
    for _ in range(hp["n_rounds"]):
        prob = _sigmoid(F)
        resid = y - prob
        tree = build_tree(X, resid, "mse", hp["max_depth"], hp["min_samples_leaf"])
        leaf = apply_tree(tree, X)
        hess = prob * (1 - prob)
        values = list(tree["value"])
        for node in np.unique(leaf):
            mask = leaf == node
            denom = hess[mask].sum()
            values[node] = float(resid[mask].sum() / denom) if denom > 1e-12 else 0.0
        tree["value"] = values
        F = F + eta * np.asarray(values)[leaf]
        trees.append(tree)
    return {"base": base, "trees": trees}


def _fit_gaussian_nb(X, y, hp):
    classes = {}
    for c in (0, 1):
        Xc = X[y == c]
        classes[str(c)] = {
            "prior": float(len(Xc) / len(X)),
            "mean": _listify(Xc.mean(axis=0)),
            "var": _listify(np.maximum(Xc.var(axis=0), hp["var_floor"])),
        }
    return {"classes": classes}


def _fit_logistic(X, y, hp):
    mu, sd = _zscore_fit(X)
    Z = (X - mu) / sd
    n, p = Z.shape
    w = np.zeros(p)
    b = 0.0
    iters = 0
    for iters in range(1, hp["n_iter"] + 1):
        prob = _sigmoid(Z @ w + b)
        g = prob - y
        gw = Z.T @ g / n
        gb = g.mean()
        w -= hp["learning_rate"] * gw
        b -= hp["learning_rate"] * gb
        if math.sqrt(gw @ gw + gb * gb) < hp["tol"]:
            break
    return {"mean": _listify(mu), "scale": _listify(sd), "weights": _listify(w), "bias": float(b), "iterations": iters}


def fit_regressor(data: Dataset, kind: str = "ols", hyperparameters: dict | None = None, seed: int = 0) -> FittedModel:
    if kind not in REGRESSORS:
        raise ParameterError(f"unknown regressor {kind!r}; expected one of {REGRESSORS}")
    if data.n < 2:
        raise DataError(f"need at least 2 rows to fit, got {data.n}")
    hp = _hyper(kind, hyperparameters)
    X, y = data.features, data.targets
    if kind == "ols":
        params = _fit_ols(X, y, hp)
    elif kind == "knn":
        params = _fit_knn(X, y, hp)
    elif kind == "tree":
        params = {"trees": [build_tree(X, y, "mse", hp["max_depth"], hp["min_samples_leaf"])]}
    elif kind == "random_forest":
        params = _fit_forest(X, y, hp, "mse", seed)
    else:
        params = _fit_boost(X, y, hp, "regression")
    return FittedModel(kind, "regression", hp, seed, data.p, params, data.feature_names)


def fit_classifier(data: Dataset, kind: str = "logistic", hyperparameters: dict | None = None, seed: int = 0) -> FittedModel:
    if kind not in CLASSIFIERS:
        raise ParameterError(f"unknown classifier {kind!r}; expected one of {CLASSIFIERS}")
    y = data.targets
    if not np.all((y == 0) | (y == 1)):
        raise LabelError("classification labels must be 0 or 1")
    if len(np.unique(y)) < 2:
        raise LabelError("both classes must be present to fit a classifier")
    if data.n < 4:
        raise DataError(f"need at least 4 rows to fit a classifier, got {data.n}")
    hp = _hyper(kind, hyperparameters)
    X = data.features
    if kind == "gaussian_nb":
        params = _fit_gaussian_nb(X, y, hp)
    elif kind == "logistic":
        params = _fit_logistic(X, y, hp)
    elif kind == "knn":
        params = _fit_knn(X, y, hp)
    elif kind == "tree":
        params = {"trees": [build_tree(X, y, "gini", hp["max_depth"], hp["min_samples_leaf"])]}
    elif kind == "random_forest":
        params = _fit_forest(X, y, hp, "gini", seed)
    else:
        params = _fit_boost(X, y, hp, "classification")
    return FittedModel(kind, "classification", hp, seed, data.p, params, data.feature_names)


# --------------------------------------------------------------------------
# prediction

def _knn_average(model, X):
    P = model.params
    mu, sd = np.asarray(P["mean"]), np.asarray(P["scale"])
    train = (np.asarray(P["X"], dtype=float) - mu) / sd
    target = np.asarray(P["y"], dtype=float)
    k = model.hyperparameters["k"]
    Q = (X - mu) / sd
    out = np.empty(len(Q))
    for start in range(0, len(Q), 512):
        q = Q[start:start + 512]
        d2 = ((q[:, None, :] - train[None, :, :]) ** 2).sum(axis=2)
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
        out[start:start + 512] = target[nearest].mean(axis=1)
    return out


def _raw_score(model, X):
    """Regression output, or class-1 probability for classifiers."""
    P = model.params
    kind = model.kind
    if kind == "ols":
        return P["intercept"] + X @ np.asarray(P["coefficients"])
    if kind == "knn":
        return _knn_average(model, X)
    if kind in ("tree", "random_forest"):
        return np.mean([predict_tree(t, X) for t in P["trees"]], axis=0)
    if kind == "gradient_boost":
        eta = model.hyperparameters["learning_rate"]
        F = np.full(len(X), P["base"])
        for t in P["trees"]:
            F = F + eta * predict_tree(t, X)
        return _sigmoid(F) if model.task == "classification" else F
    if kind == "gaussian_nb":
        logp = []
        for c in ("0", "1"):
            cs = P["classes"][c]
            mean, var = np.asarray(cs["mean"]), np.asarray(cs["var"])
            ll = -0.5 * np.sum(np.log(2 * np.pi * var) + (X - mean) ** 2 / var, axis=1)
            logp.append(ll + (math.log(cs["prior"]) if cs["prior"] > 0 else -np.inf))
        return _sigmoid(logp[1] - logp[0])
    if kind == "logistic":
        Z = (X - np.asarray(P["mean"])) / np.asarray(P["scale"])
        return _sigmoid(Z @ np.asarray(P["weights"]) + P["bias"])
    raise ParameterError(f"unknown model kind {kind!r}")


def predict_regressor(model: FittedModel, features) -> np.ndarray:
    if model.task != "regression":
        raise ParameterError(f"{model.kind} model was fitted for {model.task}")
    return _raw_score(model, _check_width(model, features))


def predict_proba(model: FittedModel, features) -> np.ndarray:
    """Class-1 probability scores."""
    if model.task != "classification":
        raise ParameterError(f"{model.kind} model was fitted for {model.task}")
    return _raw_score(model, _check_width(model, features))


def predict_classes(model: FittedModel, features, threshold: float = 0.5) -> np.ndarray:
    return (predict_proba(model, features) >= threshold).astype(int)
