"""One-way ANOVA F-scores for feature ranking and top-k projection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FeatureTable


@dataclass(frozen=True)
class FScoreReport:
    """Per-feature F-values with the group statistics behind them.

    `f_values` may contain +inf (zero within-group variability with nonzero
    between-group variability). A 0/0 case is reported as F = 0 with the
    `degenerate` flag set, so the ranking stays total without NaN.
    """

    feature_names: tuple[str, ...]
    f_values: np.ndarray        # (d,) float, >= 0, possibly +inf
    degenerate: np.ndarray      # (d,) bool, 0/0 cases
    group_counts: tuple[int, ...]   # rows per class
    group_means: np.ndarray     # (n_groups, d)
    overall_means: np.ndarray   # (d,)
    n_groups: int
    n_total: int


def anova_f_scores(table: FeatureTable) -> FScoreReport:
    """F = between-group variability / within-group variability, per feature.

    between = sum_i n_i (mean_i - mean)^2 / (K - 1)
    within  = sum_ij (y_ij - mean_i)^2 / (N - K)
    """
    labels = table.labels
    classes = np.unique(labels)
    n_groups = classes.size
    n_total = table.n_rows
    if n_groups < 2:
        raise ValueError("ANOVA needs at least two classes present")
    if n_total <= n_groups:
        raise ValueError("ANOVA needs more rows than groups")

    values = table.values
    counts = np.array([(labels == c).sum() for c in classes])
    group_means = np.stack([values[labels == c].mean(axis=0) for c in classes])
    overall = values.mean(axis=0)

    between = (counts[:, None] * (group_means - overall) ** 2).sum(axis=0)
    between /= n_groups - 1
    within = np.zeros(table.n_features)
    for c, mean_c in zip(classes, group_means):
        within += ((values[labels == c] - mean_c) ** 2).sum(axis=0)
    within /= n_total - n_groups

    degenerate = (within == 0.0) & (between == 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = between / within
    f[within == 0.0] = np.inf
    f[degenerate] = 0.0
    return FScoreReport(
        feature_names=table.feature_names,
        f_values=f,
        degenerate=degenerate,
        group_counts=tuple(int(c) for c in counts),
        group_means=group_means,
        overall_means=overall,
        n_groups=int(n_groups),
        n_total=int(n_total),
    )


def select_top_k(report: FScoreReport, k: int) -> list[int]:
    """Indices of the k largest F-values, descending; ties by ascending index.

    +inf ranks above every finite score.
    """
    d = report.f_values.size
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in [1, {d}], got {k}")
    order = sorted(range(d), key=lambda i: (-report.f_values[i], i))
    return order[:k]


def project(table: FeatureTable, indices) -> FeatureTable:
    """New table with only the named columns, in the given order."""
    idx = list(int(i) for i in indices)
    if len(set(idx)) != len(idx):
        raise ValueError("projection indices must be distinct")
    if idx and (min(idx) < 0 or max(idx) >= table.n_features):
        raise ValueError("projection index out of range")
    return table.take_columns(idx)
