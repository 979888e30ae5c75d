"""k-nearest-neighbor classification with fully specified tie rules.

Distances are Euclidean; inputs are expected standardized. Distance ties
break by ascending training-row index, vote ties by the label of the single
nearest neighbor.
"""

from __future__ import annotations

import numpy as np


def _neighbor_order(train_values: np.ndarray, query: np.ndarray) -> np.ndarray:
    d2 = ((train_values - query) ** 2).sum(axis=1)
    # primary key: squared distance; secondary: row index
    return np.lexsort((np.arange(d2.size), d2))


def knn_predict(train_values, train_labels, query, k: int) -> int:
    """Majority label among the k nearest training rows."""
    train_values = np.asarray(train_values, dtype=np.float64)
    train_labels = np.asarray(train_labels)
    query = np.asarray(query, dtype=np.float64)
    n = train_values.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if query.shape != (train_values.shape[1],):
        raise ValueError("query length does not match training columns")
    order = _neighbor_order(train_values, query)
    votes = int(train_labels[order[:k]].sum())
    if 2 * votes > k:
        return 1
    if 2 * votes < k:
        return 0
    return int(train_labels[order[0]])


class KnnClassifier:
    def __init__(self, k: int = 5):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k

    def fit(self, values, labels):
        values = np.asarray(values, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if self.k > values.shape[0]:
            raise ValueError(f"k={self.k} exceeds {values.shape[0]} training rows")
        self.train_values_ = values
        self.train_labels_ = labels
        return self

    def predict(self, queries) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        return np.array(
            [knn_predict(self.train_values_, self.train_labels_, q, self.k)
             for q in queries],
            dtype=np.int64,
        )
