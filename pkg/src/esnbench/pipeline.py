"""Method registry and the per-trial model pipeline.

Every classifier sees the same preparation: standardize with statistics fit
on the training rows only, rank features by ANOVA F-value on those same
rows (or reuse a precomputed global selection), project to the top k, then
fit. Prediction replays scaling and projection before the model runs, so
fitted pipelines are leak-free functions of their training rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import esn
from .anova import anova_f_scores, project, select_top_k
from .baselines import (
    DecisionTreeClassifier,
    GradientBoostingClassifier,
    KernelSvmClassifier,
    KnnClassifier,
    RandomForestClassifier,
)
from .data import FeatureTable, Scaler, apply_scaler, fit_scaler
from .hyperspace import Dimension, HyperSpace

METHOD_IDS = ("esn", "rf", "knn", "svc", "xgb", "dt")

_SPACES: dict[str, HyperSpace] = {
    "esn": HyperSpace((
        Dimension("n_reservoir", "int", 50, 300),
        Dimension("spectral_radius", "real", 0.1, 1.5),
        Dimension("leaking_rate", "real", 0.05, 1.0),
        Dimension("ridge", "log", 1e-6, 1e1),
    )),
    "rf": HyperSpace((
        Dimension("n_trees", "int", 50, 400),
        Dimension("max_depth", "int", 2, 12),
    )),
    "knn": HyperSpace((
        Dimension("k", "int", 1, 25),
    )),
    "svc": HyperSpace((
        Dimension("c", "log", 1e-2, 1e3),
        Dimension("gamma", "log", 1e-3, 1e1),
        Dimension("kernel", "cat", categories=("rbf", "linear")),
    )),
    "xgb": HyperSpace((
        Dimension("n_rounds", "int", 20, 300),
        Dimension("max_depth", "int", 1, 4),
        Dimension("learning_rate", "log", 0.01, 0.5),
    )),
    "dt": HyperSpace((
        Dimension("max_depth", "int", 1, 12),
        Dimension("min_samples_split", "int", 2, 20),
    )),
}

_DEFAULTS: dict[str, dict] = {
    "esn": {"n_reservoir": 100, "spectral_radius": 0.9,
            "leaking_rate": 0.5, "ridge": 1e-4},
    "rf": {"n_trees": 200, "max_depth": 8},
    "knn": {"k": 5},
    "svc": {"c": 1.0, "gamma": 0.25, "kernel": "rbf"},
    "xgb": {"n_rounds": 100, "max_depth": 2, "learning_rate": 0.1},
    "dt": {"max_depth": 5, "min_samples_split": 2},
}


def check_method(method: str) -> str:
    if method not in METHOD_IDS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHOD_IDS}")
    return method


def hyper_space(method: str) -> HyperSpace:
    return _SPACES[check_method(method)]


def default_hyper(method: str) -> dict:
    return dict(_DEFAULTS[check_method(method)])


def resolve_hyper(method: str, overrides: dict | None = None) -> dict:
    """Defaults overlaid with overrides, validated against the search space."""
    point = default_hyper(method)
    if overrides:
        unknown = set(overrides) - set(point)
        if unknown:
            raise ValueError(f"{method}: unknown hyperparameters {sorted(unknown)}")
        point.update(overrides)
    hyper_space(method).validate(point)
    return point


@dataclass(frozen=True)
class PipelineSettings:
    """Trial-independent pipeline configuration.

    `global_indices` switches feature selection from per-trial (fit on each
    training split) to a fixed precomputed set. `esn_base` carries the ESN
    fields that are not tuned (encoding, steps, scaling, sparsity, bias).
    """

    k_features: int = 4
    global_indices: tuple[int, ...] | None = None
    esn_base: esn.EsnHyperParams = field(default_factory=esn.EsnHyperParams)


@dataclass
class FittedPipeline:
    method: str
    scaler: Scaler
    feature_indices: tuple[int, ...]
    model: object

    def predict(self, values) -> np.ndarray:
        arr = np.atleast_2d(np.asarray(values, dtype=np.float64))
        scaled = (arr - self.scaler.means) / self.scaler.stds
        projected = scaled[:, list(self.feature_indices)]
        if self.method == "esn":
            return esn.predict(self.model, projected)
        return self.model.predict(projected)


def _fit_model(method: str, train: FeatureTable, hyper: dict, seed: int,
               settings: PipelineSettings):
    values, labels = train.values, train.labels
    if method == "esn":
        hp = replace(settings.esn_base, **{k: (int(v) if k == "n_reservoir" else v)
                                           for k, v in hyper.items()})
        return esn.fit(train, hp, seed)
    if method == "rf":
        return RandomForestClassifier(
            n_trees=int(hyper["n_trees"]), max_depth=int(hyper["max_depth"]),
            seed=seed,
        ).fit(values, labels)
    if method == "knn":
        return KnnClassifier(k=int(hyper["k"])).fit(values, labels)
    if method == "svc":
        return KernelSvmClassifier(
            c=hyper["c"], gamma=hyper["gamma"], kernel=hyper["kernel"], seed=seed,
        ).fit(values, labels)
    if method == "xgb":
        return GradientBoostingClassifier(
            n_rounds=int(hyper["n_rounds"]), max_depth=int(hyper["max_depth"]),
            learning_rate=hyper["learning_rate"],
        ).fit(values, labels)
    if method == "dt":
        return DecisionTreeClassifier(
            max_depth=int(hyper["max_depth"]),
            min_samples_split=int(hyper["min_samples_split"]),
        ).fit(values, labels)
    raise ValueError(f"unknown method {method!r}")


def fit_pipeline(method: str, table: FeatureTable, train_rows, seed: int,
                 hyper: dict | None = None,
                 settings: PipelineSettings = PipelineSettings()) -> FittedPipeline:
    """Standardize, select, and fit one classifier on the given rows."""
    check_method(method)
    train_rows = np.asarray(train_rows, dtype=np.intp)
    hyper = resolve_hyper(method, hyper)

    scaler = fit_scaler(table, train_rows)
    scaled_train = apply_scaler(scaler, table).take_rows(train_rows)
    if len(set(scaled_train.labels.tolist())) < 2:
        raise ValueError("training rows must contain both classes")

    if settings.global_indices is not None:
        indices = tuple(int(i) for i in settings.global_indices)
        if len(indices) != settings.k_features:
            raise ValueError("global selection size disagrees with k_features")
    else:
        report = anova_f_scores(scaled_train)
        indices = tuple(select_top_k(report, settings.k_features))

    projected = project(scaled_train, indices)
    model = _fit_model(method, projected, hyper, seed, settings)
    if method == "esn":
        model = esn.with_context(model, scaler, indices)
    return FittedPipeline(method=method, scaler=scaler,
                          feature_indices=indices, model=model)
