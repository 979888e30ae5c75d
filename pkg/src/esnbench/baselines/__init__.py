"""From-scratch comparison classifiers: KNN, CART, random forest, gradient
boosting, and a kernel SVM trained by SMO.

All fits are deterministic given (data, hyperparameters, seed) and all
predictions are pure functions of the fitted model.
"""

from .knn import KnnClassifier, knn_predict
from .tree import DecisionTreeClassifier, gini_impurity
from .forest import RandomForestClassifier
from .boosting import GradientBoostingClassifier
from .svm import KernelSvmClassifier

__all__ = [
    "KnnClassifier",
    "knn_predict",
    "DecisionTreeClassifier",
    "gini_impurity",
    "RandomForestClassifier",
    "GradientBoostingClassifier",
    "KernelSvmClassifier",
]
