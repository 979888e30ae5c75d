"""Gradient boosting on logistic loss.

Plain second-order boosting: the model starts at the class-prior log-odds,
each round fits a squared-error regression tree to the residuals y - p and
sets leaf values by one Newton step, shrunk by the learning rate. No column
subsampling or histogram tricks; parity with any particular boosting system
is not a goal.
"""

from __future__ import annotations

import math

import numpy as np

from .tree import RegressionTree


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_loss(margins: np.ndarray, labels: np.ndarray) -> float:
    # mean of log(1 + e^F) - y F, computed stably
    return float(np.mean(np.logaddexp(0.0, margins) - labels * margins))


class GradientBoostingClassifier:
    def __init__(self, n_rounds: int = 100, max_depth: int = 2,
                 learning_rate: float = 0.1, min_samples_split: int = 2):
        if n_rounds < 0:
            raise ValueError("n_rounds must be >= 0")
        if not 0.0 < learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in (0, 1]")
        self.n_rounds = n_rounds
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.min_samples_split = min_samples_split

    def fit(self, values, labels):
        values = np.asarray(values, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64)
        if not 0.0 < labels.mean() < 1.0:
            raise ValueError("training labels must contain both classes")
        p = labels.mean()
        self.base_margin_ = math.log(p / (1.0 - p))
        margins = np.full(labels.size, self.base_margin_)
        self.trees_ = []
        self.train_loss_path_ = [_log_loss(margins, labels)]
        for _ in range(self.n_rounds):
            prob = _sigmoid(margins)
            gradient = labels - prob
            hessian = prob * (1.0 - prob)
            tree = RegressionTree(max_depth=self.max_depth,
                                  min_samples_split=self.min_samples_split)
            tree.fit(values, gradient, hessian)
            margins = margins + self.learning_rate * tree.predict(values)
            self.trees_.append(tree)
            self.train_loss_path_.append(_log_loss(margins, labels))
        return self

    def decision_function(self, queries) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        margins = np.full(queries.shape[0], self.base_margin_)
        for tree in self.trees_:
            margins = margins + self.learning_rate * tree.predict(queries)
        return margins

    def predict(self, queries) -> np.ndarray:
        # sigmoid(F) >= 0.5 is exactly F >= 0
        return (self.decision_function(queries) >= 0.0).astype(np.int64)
