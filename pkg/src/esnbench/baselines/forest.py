"""Random forest: bootstrap resamples, per-split random feature subsets,
majority vote.

The ensemble is deterministic per seed but coupled to training-row order
through the bootstrap draws; shuffling rows changes the draws.
"""

from __future__ import annotations

import numpy as np

from .tree import DecisionTreeClassifier, sqrt_feature_count


class RandomForestClassifier:
    def __init__(self, n_trees: int = 200, max_depth: int | None = 8,
                 min_samples_split: int = 2, bootstrap: bool = True,
                 feature_subsampling: bool = True, seed: int = 0):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.bootstrap = bootstrap
        self.feature_subsampling = feature_subsampling
        self.seed = seed

    def fit(self, values, labels):
        values = np.asarray(values, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        n, d = values.shape
        rng = np.random.default_rng(self.seed)
        ones = int(labels.sum())
        self.prior_majority_ = 1 if 2 * ones >= n else 0
        n_sub = sqrt_feature_count(d) if self.feature_subsampling else None
        self.trees_ = []
        for _ in range(self.n_trees):
            if self.bootstrap:
                idx = rng.integers(0, n, size=n)
                sample_values, sample_labels = values[idx], labels[idx]
            else:
                sample_values, sample_labels = values, labels
            tree = DecisionTreeClassifier(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
            )
            tree.fit(sample_values, sample_labels,
                     feature_rng=rng if n_sub is not None else None,
                     n_feature_sample=n_sub)
            self.trees_.append(tree)
        return self

    def predict(self, queries) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        votes = np.zeros(queries.shape[0], dtype=np.int64)
        for tree in self.trees_:
            votes += tree.predict(queries)
        out = np.empty(queries.shape[0], dtype=np.int64)
        half = self.n_trees
        for i, v in enumerate(votes):
            if 2 * v > half:
                out[i] = 1
            elif 2 * v < half:
                out[i] = 0
            else:
                out[i] = self.prior_majority_
        return out
