"""Reservoir-computing and classical classifiers for the 22-feature voice
table, with a seeded repeated-trial benchmark harness."""

__version__ = "0.1.0"

from .data import FeatureTable, Scaler, TrialSplit, load_csv, split
from .anova import FScoreReport, anova_f_scores, project, select_top_k
from .esn import EsnHyperParams, EsnModel, Reservoir, StateMatrix
from .metrics import ConfusionMatrix, TrialMetrics, confusion, metrics

__all__ = [
    "FeatureTable", "Scaler", "TrialSplit", "load_csv", "split",
    "FScoreReport", "anova_f_scores", "select_top_k", "project",
    "EsnHyperParams", "EsnModel", "Reservoir", "StateMatrix",
    "ConfusionMatrix", "TrialMetrics", "confusion", "metrics",
    "__version__",
]
