"""CART trees: a Gini classification tree and the squared-error regression
tree used by the boosting stages.

Splits are binary and axis-aligned, thresholds sit at midpoints between
consecutive distinct sorted values, and the best split minimizes the
weighted child impurity. Ties break toward the lowest feature index, then
the lowest threshold, so fits are independent of training-row order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def gini_impurity(labels) -> float:
    """1 - p0^2 - p1^2 for a binary label multiset."""
    arr = np.asarray(labels)
    if arr.size == 0:
        raise ValueError("gini impurity of an empty label set")
    p1 = float(arr.sum()) / arr.size
    p0 = 1.0 - p1
    return 1.0 - p0 * p0 - p1 * p1


def _boundaries(sorted_col: np.ndarray) -> np.ndarray:
    """Positions i where a split between sorted_col[i] and [i+1] is valid."""
    return np.flatnonzero(sorted_col[1:] != sorted_col[:-1])


def _best_split_gini(values, labels, feature_ids):
    """(feature, threshold, weighted_gini) minimizing weighted child Gini,
    or None when no feature has two distinct values."""
    n = labels.size
    total_ones = int(labels.sum())
    best = None
    for f in feature_ids:
        col = values[:, f]
        order = np.argsort(col, kind="stable")
        sc = col[order]
        cut = _boundaries(sc)
        if cut.size == 0:
            continue
        ones = np.cumsum(labels[order])
        nl = (cut + 1).astype(np.float64)
        nr = n - nl
        ol = ones[cut].astype(np.float64)
        orr = total_ones - ol
        gl = 1.0 - (ol / nl) ** 2 - ((nl - ol) / nl) ** 2
        gr = 1.0 - (orr / nr) ** 2 - ((nr - orr) / nr) ** 2
        weighted = (nl * gl + nr * gr) / n
        i = int(np.argmin(weighted))
        if best is None or weighted[i] < best[2]:
            thr = 0.5 * (sc[cut[i]] + sc[cut[i] + 1])
            best = (int(f), float(thr), float(weighted[i]))
    return best


def _best_split_sse(values, response, feature_ids):
    """(feature, threshold, sse) minimizing summed child squared error."""
    n = response.size
    best = None
    for f in feature_ids:
        col = values[:, f]
        order = np.argsort(col, kind="stable")
        sc = col[order]
        cut = _boundaries(sc)
        if cut.size == 0:
            continue
        sr = response[order]
        s = np.cumsum(sr)
        q = np.cumsum(sr * sr)
        nl = (cut + 1).astype(np.float64)
        nr = n - nl
        sl = s[cut]
        ql = q[cut]
        sse = (ql - sl * sl / nl) + ((q[-1] - ql) - (s[-1] - sl) ** 2 / nr)
        i = int(np.argmin(sse))
        if best is None or sse[i] < best[2]:
            thr = 0.5 * (sc[cut[i]] + sc[cut[i] + 1])
            best = (int(f), float(thr), float(sse[i]))
    return best


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    value: float = 0.0      # class label or regression output

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def _walk(node: _Node, row: np.ndarray) -> float:
    while not node.is_leaf:
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node.value


class DecisionTreeClassifier:
    """Gini CART for binary labels.

    `feature_rng`/`n_feature_sample` let a forest restrict each split to a
    random feature subset; nodes are grown depth-first, left child first, so
    the rng draw order is fixed.
    """

    def __init__(self, max_depth: int | None = None, min_samples_split: int = 2):
        if max_depth is not None and max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split

    def fit(self, values, labels, feature_rng=None, n_feature_sample=None):
        values = np.asarray(values, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if values.ndim != 2 or labels.shape != (values.shape[0],):
            raise ValueError("values and labels disagree on row count")
        ones = int(labels.sum())
        # tie on the training prior resolves to the positive class
        self.prior_majority_ = 1 if 2 * ones >= labels.size else 0
        self._rng = feature_rng
        self._n_sub = n_feature_sample
        self._d = values.shape[1]
        self.root_ = self._grow(values, labels, depth=0)
        del self._rng
        return self

    def _leaf(self, labels) -> _Node:
        ones = int(labels.sum())
        zeros = labels.size - ones
        if ones > zeros:
            label = 1
        elif zeros > ones:
            label = 0
        else:
            label = self.prior_majority_
        return _Node(value=float(label))

    def _eligible(self):
        if self._rng is None or self._n_sub is None or self._n_sub >= self._d:
            return range(self._d)
        return np.sort(self._rng.choice(self._d, size=self._n_sub, replace=False))

    def _grow(self, values, labels, depth) -> _Node:
        n = labels.size
        pure = labels.min() == labels.max()
        if (pure or n < self.min_samples_split
                or (self.max_depth is not None and depth >= self.max_depth)):
            return self._leaf(labels)
        best = _best_split_gini(values, labels, self._eligible())
        if best is None:
            return self._leaf(labels)
        f, thr, _ = best
        mask = values[:, f] <= thr
        node = _Node(feature=f, threshold=thr)
        node.left = self._grow(values[mask], labels[mask], depth + 1)
        node.right = self._grow(values[~mask], labels[~mask], depth + 1)
        return node

    def predict(self, queries) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        return np.array([int(_walk(self.root_, q)) for q in queries], dtype=np.int64)


class RegressionTree:
    """Squared-error CART on residuals with one-Newton-step leaf values.

    Leaves output sum(gradient) / sum(hessian) over their rows; a vanishing
    hessian sum yields 0 to keep values finite.
    """

    def __init__(self, max_depth: int = 2, min_samples_split: int = 2):
        if max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split

    def fit(self, values, gradient, hessian):
        values = np.asarray(values, dtype=np.float64)
        gradient = np.asarray(gradient, dtype=np.float64)
        hessian = np.asarray(hessian, dtype=np.float64)
        self.root_ = self._grow(values, gradient, hessian, depth=0)
        return self

    @staticmethod
    def _leaf(gradient, hessian) -> _Node:
        denom = float(hessian.sum())
        value = 0.0 if abs(denom) < 1e-150 else float(gradient.sum()) / denom
        return _Node(value=value)

    def _grow(self, values, gradient, hessian, depth) -> _Node:
        n = gradient.size
        if n < self.min_samples_split or depth >= self.max_depth:
            return self._leaf(gradient, hessian)
        if np.all(gradient == gradient[0]):
            return self._leaf(gradient, hessian)
        best = _best_split_sse(values, gradient, range(values.shape[1]))
        if best is None:
            return self._leaf(gradient, hessian)
        f, thr, _ = best
        mask = values[:, f] <= thr
        node = _Node(feature=f, threshold=thr)
        node.left = self._grow(values[mask], gradient[mask], hessian[mask], depth + 1)
        node.right = self._grow(values[~mask], gradient[~mask], hessian[~mask], depth + 1)
        return node

    def predict(self, queries) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        return np.array([_walk(self.root_, q) for q in queries], dtype=np.float64)


def sqrt_feature_count(n_features: int) -> int:
    return math.ceil(math.sqrt(n_features))
