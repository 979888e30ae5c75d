"""Hyperparameter tuning: Gaussian-process surrogate with expected
improvement over a sampled candidate set, scored by stratified
cross-validated accuracy on the training split.

The loop is the plain canonical one: a Latin-hypercube initial design (with
the method's default point injected first, so tuning can never lose to the
defaults on the CV objective), then GP + EI proposals. Everything is
deterministic per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.special

from .data import FeatureTable
from .hyperspace import HyperSpace
from .pipeline import PipelineSettings, default_hyper, fit_pipeline, hyper_space

N_INIT = 10
N_CANDIDATES = 1024
GP_NOISE = 1e-6
_LENGTH_SCALE_GRID = (0.05, 0.1, 0.2, 0.35, 0.5, 1.0, 2.0)


def derive_seed(*parts: int) -> int:
    """Stable child seed for a role within a seeded computation."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


@dataclass
class TuneHistory:
    """Evaluated (point, objective) pairs in evaluation order."""

    entries: list[tuple[dict, float]]
    seed: int

    @property
    def best_index(self) -> int:
        values = [v for _, v in self.entries]
        return int(np.argmax(values))

    @property
    def best_point(self) -> dict:
        return self.entries[self.best_index][0]

    @property
    def best_value(self) -> float:
        return self.entries[self.best_index][1]

    def best_so_far(self) -> list[float]:
        out, best = [], -math.inf
        for _, v in self.entries:
            best = max(best, v)
            out.append(best)
        return out


def stratified_fold_indices(labels: np.ndarray, folds: int, seed: int) -> list[np.ndarray]:
    """Class-wise shuffled round-robin assignment to `folds` validation sets."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    assignment = np.empty(labels.size, dtype=np.intp)
    for c in (0, 1):
        rows = np.flatnonzero(labels == c)
        if rows.size < folds:
            raise ValueError(
                f"class {c} has {rows.size} rows; too few for {folds} stratified "
                "folds (dataset too small or imbalanced)"
            )
        perm = rng.permutation(rows)
        assignment[perm] = np.arange(perm.size) % folds
    return [np.flatnonzero(assignment == f) for f in range(folds)]


def cv_objective(method: str, point: dict, train: FeatureTable, folds: int = 5,
                 seed: int = 0,
                 settings: PipelineSettings = PipelineSettings()) -> float:
    """Mean accuracy over stratified k-fold CV of the full pipeline.

    Scaling and feature selection are re-fit inside each fold; the fold
    assignment depends only on (labels, folds, seed).
    """
    fold_rows = stratified_fold_indices(train.labels, folds, derive_seed(seed, 0xF01D))
    accuracies = []
    for f, val_rows in enumerate(fold_rows):
        mask = np.ones(train.n_rows, dtype=bool)
        mask[val_rows] = False
        fit_rows = np.flatnonzero(mask)
        fitted = fit_pipeline(method, train, fit_rows,
                              seed=derive_seed(seed, f), hyper=point,
                              settings=settings)
        predicted = fitted.predict(train.values[val_rows])
        accuracies.append(float((predicted == train.labels[val_rows]).mean()))
    return float(np.mean(accuracies))


def _se_kernel(za: np.ndarray, zb: np.ndarray, scales: np.ndarray) -> np.ndarray:
    d = (za[:, None, :] - zb[None, :, :]) / scales
    return np.exp(-0.5 * (d * d).sum(axis=2))


class _Gp:
    """Zero-mean squared-exponential GP on [0,1]-normalized coordinates.

    Targets are standardized by the caller, so the signal variance is fixed
    at 1; per-coordinate length scales come from a coordinate-descent grid
    search on the log marginal likelihood.
    """

    def __init__(self, z: np.ndarray, y: np.ndarray, noise: float = GP_NOISE):
        self.z = z
        self.y = y
        self.noise = noise
        d = z.shape[1]
        scales = np.full(d, 0.5)
        best = self._log_marginal(scales)
        for _ in range(2):
            for dim in range(d):
                for g in _LENGTH_SCALE_GRID:
                    trial = scales.copy()
                    trial[dim] = g
                    lml = self._log_marginal(trial)
                    if lml > best:
                        best, scales = lml, trial
        self.scales = scales
        k = _se_kernel(z, z, scales)
        k[np.diag_indices_from(k)] += self.noise
        self._chol = scipy.linalg.cho_factor(k, lower=True)
        self._alpha = scipy.linalg.cho_solve(self._chol, y)

    def _log_marginal(self, scales: np.ndarray) -> float:
        k = _se_kernel(self.z, self.z, scales)
        k[np.diag_indices_from(k)] += self.noise
        try:
            chol = scipy.linalg.cholesky(k, lower=True)
        except scipy.linalg.LinAlgError:
            return -math.inf
        alpha = scipy.linalg.cho_solve((chol, True), self.y)
        return float(
            -0.5 * self.y @ alpha
            - np.log(np.diag(chol)).sum()
            - 0.5 * self.y.size * math.log(2.0 * math.pi)
        )

    def predict(self, zq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ks = _se_kernel(zq, self.z, self.scales)
        mu = ks @ self._alpha
        solved = scipy.linalg.cho_solve(self._chol, ks.T)
        var = 1.0 + self.noise - (ks * solved.T).sum(axis=1)
        return mu, np.maximum(var, 0.0)


def expected_improvement(mu: np.ndarray, var: np.ndarray,
                         best: float) -> np.ndarray:
    """EI for maximization; zero wherever the predictive std vanishes."""
    sigma = np.sqrt(var)
    out = np.zeros_like(mu)
    ok = sigma > 1e-12
    z = (mu[ok] - best) / sigma[ok]
    cdf = 0.5 * (1.0 + scipy.special.erf(z / math.sqrt(2.0)))
    pdf = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    out[ok] = (mu[ok] - best) * cdf + sigma[ok] * pdf
    return np.maximum(out, 0.0)


def propose(history, space: HyperSpace, rng: np.random.Generator,
            n_init: int = N_INIT, n_candidates: int = N_CANDIDATES) -> dict:
    """Next point to evaluate.

    The first `n_init` calls walk a Latin-hypercube design; afterwards a GP
    is fit to the history and the EI-maximizing candidate out of
    `n_candidates` uniform samples is returned. A flat history (all
    objectives equal) falls back to a uniform random point.
    """
    entries = history.entries if isinstance(history, TuneHistory) else list(history)
    if len(entries) < n_init:
        return space.latin_hypercube(n_init, rng)[len(entries)]
    y = np.array([v for _, v in entries])
    if y.std() == 0.0:
        return space.sample(rng)
    z = np.stack([space.embed(p) for p, _ in entries])
    y_std = (y - y.mean()) / y.std()
    gp = _Gp(z, y_std)
    candidates = [space.sample(rng) for _ in range(n_candidates)]
    zq = np.stack([space.embed(p) for p in candidates])
    mu, var = gp.predict(zq)
    ei = expected_improvement(mu, var, float(y_std.max()))
    return candidates[int(np.argmax(ei))]


def tune(method: str, space: HyperSpace | None, train: FeatureTable,
         budget: int, seed: int, folds: int = 5,
         settings: PipelineSettings = PipelineSettings(),
         n_init: int = N_INIT,
         n_candidates: int = N_CANDIDATES) -> tuple[dict, TuneHistory]:
    """Run the BO loop for `budget` objective evaluations; return the argmax.

    Evaluation 0 is the method's default point; the rest of the initial
    design is a Latin hypercube. Fold assignment is fixed across
    evaluations so objective values are comparable.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if space is None:
        space = hyper_space(method)
    design = [default_hyper(method)]
    if n_init > 1:
        design += space.latin_hypercube(n_init - 1, np.random.default_rng([seed, 0]))
    history = TuneHistory(entries=[], seed=seed)
    for t in range(budget):
        if t < len(design):
            point = design[t]
        else:
            point = propose(history, space, np.random.default_rng([seed, t]),
                            n_init=n_init, n_candidates=n_candidates)
        space.validate(point)
        value = cv_objective(method, point, train, folds=folds, seed=seed,
                             settings=settings)
        history.entries.append((point, value))
    return history.best_point, history
