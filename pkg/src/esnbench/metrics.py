"""Confusion-matrix metrics and cross-trial aggregation.

Class 1 (PD) is the positive class throughout: a false negative is a PD
recording predicted healthy. Metrics with a zero denominator are flagged
undefined (None) and excluded from aggregation rather than substituted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

METRIC_NAMES = ("accuracy", "precision", "recall", "fn_rate", "f1")

#: Absolute snap tolerance when testing a value against a bin edge. Metric
#: values are small-denominator rationals, so anything within 1e-9 of an
#: edge is an exact hit up to float rounding.
_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class TrialMetrics:
    """Derived rates in [0, 1]; None marks an undefined (0/0) metric."""

    accuracy: float
    precision: float | None
    recall: float | None
    fn_rate: float | None
    f1: float | None


@dataclass(frozen=True)
class MetricSummary:
    """Mean and sample std (divisor n-1) over the defined values, as percent."""

    mean_pct: float | None
    std_pct: float | None       # None when fewer than 2 defined values
    n_defined: int
    n_excluded: int


@dataclass(frozen=True)
class CdfTable:
    """Cumulative fraction of values at or below each bin's upper edge."""

    upper_edges: np.ndarray
    cumulative: np.ndarray


def confusion(predicted, truth) -> ConfusionMatrix:
    pred = np.asarray(predicted)
    true = np.asarray(truth)
    if pred.shape != true.shape or pred.ndim != 1 or pred.size == 0:
        raise ValueError("predicted and truth must be equal-length 1-D, non-empty")
    for arr, name in ((pred, "predicted"), (true, "truth")):
        if not np.isin(arr, (0, 1)).all():
            raise ValueError(f"{name} labels must all be 0 or 1")
    tp = int(((pred == 1) & (true == 1)).sum())
    tn = int(((pred == 0) & (true == 0)).sum())
    fp = int(((pred == 1) & (true == 0)).sum())
    fn = int(((pred == 0) & (true == 1)).sum())
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def metrics(cm: ConfusionMatrix) -> TrialMetrics:
    """Accuracy, precision, recall, FN rate, and F1 from one confusion matrix.

    recall and fn_rate share the integer denominator tp+fn, so the float
    identity recall + fn_rate == 1.0 holds exactly whenever both are defined.
    """
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp > 0 else None
    if cm.tp + cm.fn > 0:
        recall = cm.tp / (cm.tp + cm.fn)
        fn_rate = cm.fn / (cm.tp + cm.fn)
    else:
        recall = fn_rate = None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return TrialMetrics(accuracy=accuracy, precision=precision, recall=recall,
                        fn_rate=fn_rate, f1=f1)


def f1_from_rates(precision: float, recall: float) -> float | None:
    """Harmonic mean of aggregate precision and recall (Table-3 style)."""
    if precision + recall == 0:
        return None
    return 2.0 * precision * recall / (precision + recall)


def aggregate(per_trial: Sequence[TrialMetrics]) -> dict[str, MetricSummary]:
    """Per-metric mean and sample std over the defined values, as percentages.

    An all-undefined metric is reported as missing (mean None), never as 0.
    """
    if not per_trial:
        raise ValueError("no trials to aggregate")
    out = {}
    for name in METRIC_NAMES:
        defined = [getattr(m, name) for m in per_trial
                   if getattr(m, name) is not None]
        n = len(defined)
        if n == 0:
            out[name] = MetricSummary(None, None, 0, len(per_trial))
            continue
        # sorting fixes the summation order, so aggregation is bit-exact
        # permutation-invariant over trials
        arr = np.sort(np.asarray(defined))
        mean = float(arr.mean()) * 100.0
        std = float(arr.std(ddof=1)) * 100.0 if n >= 2 else None
        out[name] = MetricSummary(mean, std, n, len(per_trial) - n)
    return out


def cdf_bins(values, bin_width: float = 0.02, lo: float = 0.0,
             hi: float = 1.0) -> CdfTable:
    """Cumulative fractions over equal-width bins spanning [lo, hi].

    A value exactly on an edge counts into the bin ending at that edge.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise ValueError("no values to bin")
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    n_bins_real = (hi - lo) / bin_width
    n_bins = round(n_bins_real)
    if n_bins < 1 or abs(n_bins_real - n_bins) > 1e-9:
        raise ValueError(f"bin_width {bin_width} does not divide [{lo}, {hi}]")
    if vals.min() < lo - _EDGE_EPS or vals.max() > hi + _EDGE_EPS:
        raise ValueError(f"values outside [{lo}, {hi}]")
    edges = np.linspace(lo, hi, n_bins + 1)[1:]
    cumulative = np.array([
        float((vals <= edge + _EDGE_EPS).sum()) / vals.size for edge in edges
    ])
    return CdfTable(upper_edges=edges, cumulative=cumulative)


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 min(std, IQR/1.34) n^(-1/5), with either term standing in when the
    other is zero."""
    if values.min() == values.max():
        raise ValueError(
            "all values identical; pass an explicit bandwidth for a KDE"
        )
    n = values.size
    std = float(values.std(ddof=1))
    q25, q75 = np.percentile(values, [25.0, 75.0])
    iqr_term = float(q75 - q25) / 1.34
    spread = min(std, iqr_term) if std > 0 and iqr_term > 0 else max(std, iqr_term)
    return 0.9 * spread * n ** (-0.2)


def kde(values, bandwidth="auto", grid_size: int = 256):
    """Gaussian kernel density estimate on a grid spanning the data +- 3h.

    Returns (grid, density) arrays.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size < 2 and bandwidth == "auto":
        raise ValueError("auto bandwidth needs at least 2 values")
    if vals.size == 0:
        raise ValueError("no values for a KDE")
    if bandwidth == "auto":
        h = silverman_bandwidth(vals)
    else:
        h = float(bandwidth)
        if h <= 0:
            raise ValueError("bandwidth must be positive")
    grid = np.linspace(vals.min() - 3.0 * h, vals.max() + 3.0 * h, grid_size)
    z = (grid[:, None] - vals[None, :]) / h
    density = np.exp(-0.5 * z * z).sum(axis=1) / (vals.size * h * math.sqrt(2.0 * math.pi))
    return grid, density
