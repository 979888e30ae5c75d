"""Soft-margin kernel SVM trained by simplified SMO.

Pairwise coordinate ascent on the dual with random partner selection;
sweeps repeat until several consecutive passes change nothing or the sweep
cap is hit. Each accepted pair update solves its two-variable subproblem
exactly, so the dual objective never decreases. A final KKT scan sets
`converged_`; predictions are usable either way.
"""

from __future__ import annotations

import numpy as np


def _kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return a @ b.T
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-gamma * d2)


class KernelSvmClassifier:
    CALM_PASSES = 5

    def __init__(self, c: float = 1.0, gamma: float = 0.25, kernel: str = "rbf",
                 tol: float = 1e-3, max_sweeps: int = 400, seed: int = 0,
                 track_objective: bool = False):
        if c <= 0:
            raise ValueError("c must be > 0")
        if kernel not in ("rbf", "linear"):
            raise ValueError("kernel must be 'rbf' or 'linear'")
        if kernel == "rbf" and gamma <= 0:
            raise ValueError("gamma must be > 0 for the rbf kernel")
        self.c = c
        self.gamma = gamma
        self.kernel = kernel
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.seed = seed
        self.track_objective = track_objective

    def _dual_objective(self, k: np.ndarray, alphas: np.ndarray, y: np.ndarray) -> float:
        u = alphas * y
        return float(alphas.sum() - 0.5 * u @ k @ u)

    def fit(self, values, labels):
        values = np.asarray(values, dtype=np.float64)
        labels01 = np.asarray(labels, dtype=np.int64)
        if len(set(labels01.tolist())) < 2:
            raise ValueError("training labels must contain both classes")
        y = np.where(labels01 == 1, 1.0, -1.0)
        n = values.shape[0]
        k = _kernel_matrix(values, values, self.kernel, self.gamma)
        alphas = np.zeros(n)
        b = 0.0
        rng = np.random.default_rng(self.seed)
        c, tol = self.c, self.tol
        self.objective_path_ = [0.0] if self.track_objective else None

        def decision_all() -> np.ndarray:
            return (alphas * y) @ k + b

        snap = 1e-10 * c

        def try_pair(i: int, j: int, e_i: float) -> bool:
            nonlocal b
            e_j = float((alphas * y) @ k[:, j]) + b - y[j]
            a_i_old, a_j_old = alphas[i], alphas[j]
            if y[i] != y[j]:
                lo = max(0.0, a_j_old - a_i_old)
                hi = min(c, c + a_j_old - a_i_old)
            else:
                lo = max(0.0, a_i_old + a_j_old - c)
                hi = min(c, a_i_old + a_j_old)
            if lo >= hi:
                return False
            eta = 2.0 * k[i, j] - k[i, i] - k[j, j]
            if eta >= 0:
                return False
            a_j = a_j_old - y[j] * (e_i - e_j) / eta
            a_j = min(hi, max(lo, a_j))
            if a_j < snap:
                a_j = 0.0
            elif a_j > c - snap:
                a_j = c
            if abs(a_j - a_j_old) < 1e-7:
                return False
            a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)
            if a_i < snap:
                a_i = 0.0
            elif a_i > c - snap:
                a_i = c
            alphas[i], alphas[j] = a_i, a_j
            b1 = (b - e_i - y[i] * (a_i - a_i_old) * k[i, i]
                  - y[j] * (a_j - a_j_old) * k[i, j])
            b2 = (b - e_j - y[i] * (a_i - a_i_old) * k[i, j]
                  - y[j] * (a_j - a_j_old) * k[j, j])
            if 0.0 < a_i < c:
                b = b1
            elif 0.0 < a_j < c:
                b = b2
            else:
                b = 0.5 * (b1 + b2)
            if self.objective_path_ is not None:
                self.objective_path_.append(self._dual_objective(k, alphas, y))
            return True

        calm = 0
        sweeps = 0
        while calm < self.CALM_PASSES and sweeps < self.max_sweeps:
            changed = 0
            for i in range(n):
                e_i = float((alphas * y) @ k[:, i]) + b - y[i]
                r_i = y[i] * e_i
                if not ((r_i < -tol and alphas[i] < c)
                        or (r_i > tol and alphas[i] > 0)):
                    continue
                # walk all partners from a random start, take the first
                # productive one
                start = int(rng.integers(0, n - 1))
                for step in range(n - 1):
                    j = (i + 1 + (start + step) % (n - 1)) % n
                    if try_pair(i, j, e_i):
                        changed += 1
                        break
            calm = calm + 1 if changed == 0 else 0
            sweeps += 1

        margins = y * decision_all()
        violation = np.maximum(
            np.where(alphas < c, 1.0 - margins, -np.inf),
            np.where(alphas > 0, margins - 1.0, -np.inf),
        )
        self.converged_ = bool(violation.max() <= tol)
        self.bias_ = b
        support = alphas > 1e-12
        self.support_values_ = values[support]
        self.support_signs_ = y[support]
        self.support_alphas_ = alphas[support]
        self.alphas_ = alphas
        return self

    def decision_function(self, queries) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        if self.support_values_.shape[0] == 0:
            return np.full(queries.shape[0], self.bias_)
        k = _kernel_matrix(self.support_values_, queries, self.kernel, self.gamma)
        return (self.support_alphas_ * self.support_signs_) @ k + self.bias_

    def predict(self, queries) -> np.ndarray:
        # a decision value of exactly 0 maps to class 1
        return (self.decision_function(queries) >= 0.0).astype(np.int64)
