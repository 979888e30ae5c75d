import numpy as np
import pytest

from esnbench.baselines import (
    DecisionTreeClassifier,
    GradientBoostingClassifier,
    KernelSvmClassifier,
    KnnClassifier,
    RandomForestClassifier,
    gini_impurity,
    knn_predict,
)
from esnbench.baselines.svm import _kernel_matrix
from esnbench.baselines.tree import RegressionTree

from synth import make_blobs


# ---------------------------------------------------------------- oracles

def knn_oracle(train_x, train_y, query, k):
    """Plain-python exhaustive scan with the documented tie rules."""
    dists = [(float(((row - query) ** 2).sum()), i) for i, row in enumerate(train_x)]
    order = [i for _, i in sorted(dists)]
    votes = [int(train_y[i]) for i in order[:k]]
    ones = sum(votes)
    if 2 * ones > k:
        return 1
    if 2 * ones < k:
        return 0
    return int(train_y[order[0]])


def gini_of_counts(n0, n1):
    n = n0 + n1
    return 1.0 - (n0 / n) ** 2 - (n1 / n) ** 2


def best_split_oracle(values, labels):
    """Exhaustive enumeration of every midpoint threshold on every feature."""
    n, d = values.shape
    best = None
    for f in range(d):
        distinct = sorted(set(values[:, f].tolist()))
        for lo, hi in zip(distinct, distinct[1:]):
            thr = 0.5 * (lo + hi)
            left = labels[values[:, f] <= thr]
            right = labels[values[:, f] > thr]
            gl = gini_of_counts(int((left == 0).sum()), int((left == 1).sum()))
            gr = gini_of_counts(int((right == 0).sum()), int((right == 1).sum()))
            w = (left.size * gl + right.size * gr) / n
            if best is None or w < best[2]:
                best = (f, thr, w)
    return best


def assert_tree_splits_match_oracle(node, values, labels, min_samples_split):
    if node.is_leaf:
        return
    assert labels.size >= min_samples_split
    expected = best_split_oracle(values, labels)
    assert expected is not None
    assert node.feature == expected[0]
    assert node.threshold == pytest.approx(expected[1], abs=0)
    mask = values[:, node.feature] <= node.threshold
    assert_tree_splits_match_oracle(node.left, values[mask], labels[mask],
                                    min_samples_split)
    assert_tree_splits_match_oracle(node.right, values[~mask], labels[~mask],
                                    min_samples_split)


def kkt_audit(model, values, labels01, tol):
    """Recompute every margin from scratch and check the three KKT cases."""
    y = np.where(np.asarray(labels01) == 1, 1.0, -1.0)
    k = _kernel_matrix(np.asarray(values, float), np.asarray(values, float),
                       model.kernel, model.gamma)
    f = (model.alphas_ * y) @ k + model.bias_
    for i, (a, margin) in enumerate(zip(model.alphas_, y * f)):
        if a < 1e-12:
            assert margin >= 1.0 - tol, f"row {i}: margin {margin} at alpha=0"
        elif a > model.c - 1e-12:
            assert margin <= 1.0 + tol, f"row {i}: margin {margin} at alpha=C"
        else:
            assert abs(margin - 1.0) <= tol, f"row {i}: margin {margin} interior"


# ---------------------------------------------------------------- knn

class TestKnn:
    def test_nearest_point(self):
        x = np.array([[0.0, 0.0], [1.0, 1.0]])
        y = np.array([0, 1])
        assert knn_predict(x, y, np.array([0.1, 0.0]), 1) == 0

    def test_vote_tie_goes_to_nearest(self):
        x = np.array([[0.0, 0.0], [1.0, 1.0]])
        y = np.array([0, 1])
        # equidistant: index tie-break puts row 0 first
        assert knn_predict(x, y, np.array([0.5, 0.5]), 2) == 0

    def test_k_out_of_range(self):
        x = np.array([[0.0], [1.0]])
        with pytest.raises(ValueError):
            knn_predict(x, np.array([0, 1]), np.array([0.5]), 3)

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(17)
        train_x = rng.normal(0, 1, (200, 3))
        train_y = (rng.random(200) < 0.5).astype(np.int64)
        for _ in range(200):
            q = rng.normal(0, 1, 3)
            k = int(rng.integers(1, 12))
            assert knn_predict(train_x, train_y, q, k) == knn_oracle(
                train_x, train_y, q, k
            )

    def test_row_shuffle_invariance_with_distinct_distances(self):
        rng = np.random.default_rng(18)
        train_x = rng.normal(0, 1, (60, 2))
        train_y = (rng.random(60) < 0.5).astype(np.int64)
        perm = rng.permutation(60)
        a = KnnClassifier(k=5).fit(train_x, train_y)
        b = KnnClassifier(k=5).fit(train_x[perm], train_y[perm])
        queries = rng.normal(0, 1, (40, 2))
        assert np.array_equal(a.predict(queries), b.predict(queries))


# ---------------------------------------------------------------- trees

class TestGini:
    def test_balanced(self):
        assert gini_impurity([1, 1, 0, 0]) == pytest.approx(0.5)

    def test_pure(self):
        assert gini_impurity([1, 1, 1, 1]) == 0.0

    def test_three_to_one(self):
        assert gini_impurity([1, 1, 1, 0]) == pytest.approx(0.375)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            gini_impurity([])


class TestDecisionTree:
    def test_perfect_separator_wins_root(self):
        rng = np.random.default_rng(20)
        n = 30
        labels = (rng.random(n) < 0.5).astype(np.int64)
        labels[:2] = [0, 1]
        values = rng.normal(0, 1, (n, 3))
        values[:, 1] = labels * 2.0 - 1.0       # feature 1 separates perfectly
        tree = DecisionTreeClassifier().fit(values, labels)
        assert tree.root_.feature == 1
        assert np.array_equal(tree.predict(values), labels)

    def test_depth_zero_is_majority_stump(self):
        values = np.arange(10, dtype=float).reshape(-1, 1)
        labels = np.array([1, 1, 1, 1, 1, 1, 0, 0, 0, 0])
        tree = DecisionTreeClassifier(max_depth=0).fit(values, labels)
        assert np.array_equal(tree.predict(values), np.ones(10, dtype=int))

    def test_every_split_matches_enumeration_oracle(self):
        rng = np.random.default_rng(21)
        for trial in range(8):
            values = rng.normal(0, 1, (50, 4))
            if trial % 2:
                values = np.round(values, 1)    # force duplicate values
            labels = (rng.random(50) < 0.55).astype(np.int64)
            labels[:2] = [0, 1]
            tree = DecisionTreeClassifier(max_depth=4).fit(values, labels)
            assert_tree_splits_match_oracle(tree.root_, values, labels, 2)

    def test_row_shuffle_invariance(self):
        rng = np.random.default_rng(22)
        values = rng.normal(0, 1, (80, 3))
        labels = (values[:, 0] + 0.3 * rng.normal(0, 1, 80) > 0).astype(np.int64)
        perm = rng.permutation(80)
        a = DecisionTreeClassifier(max_depth=6).fit(values, labels)
        b = DecisionTreeClassifier(max_depth=6).fit(values[perm], labels[perm])
        queries = rng.normal(0, 1, (50, 3))
        assert np.array_equal(a.predict(queries), b.predict(queries))

    def test_leaf_tie_uses_prior(self):
        # one duplicated point with conflicting labels: leaf ties, prior is 1
        values = np.array([[0.0], [0.0], [1.0], [1.0], [1.0]])
        labels = np.array([0, 1, 1, 1, 0])
        tree = DecisionTreeClassifier().fit(values, labels)
        assert tree.predict(np.array([[0.0]]))[0] == 1


# ---------------------------------------------------------------- forest

class TestRandomForest:
    def test_degenerate_forest_equals_single_tree(self):
        rng = np.random.default_rng(23)
        values = rng.normal(0, 1, (60, 4))
        labels = (values[:, 2] > 0.2).astype(np.int64)
        forest = RandomForestClassifier(
            n_trees=1, max_depth=5, bootstrap=False,
            feature_subsampling=False, seed=0,
        ).fit(values, labels)
        tree = DecisionTreeClassifier(max_depth=5).fit(values, labels)
        queries = rng.normal(0, 1, (40, 4))
        assert np.array_equal(forest.predict(queries), tree.predict(queries))

    def test_seeded_determinism(self):
        values, labels = make_blobs(seed=3, n_per_class=40, separation=1.5)
        a = RandomForestClassifier(n_trees=25, max_depth=4, seed=9).fit(values, labels)
        b = RandomForestClassifier(n_trees=25, max_depth=4, seed=9).fit(values, labels)
        queries = np.random.default_rng(1).normal(0, 1, (30, 2))
        assert np.array_equal(a.predict(queries), b.predict(queries))

    def test_learns_blobs(self):
        values, labels = make_blobs(seed=4, n_per_class=50, separation=3.0)
        forest = RandomForestClassifier(n_trees=50, max_depth=6, seed=2).fit(
            values, labels
        )
        assert float((forest.predict(values) == labels).mean()) >= 0.95

    def test_labels_always_binary(self):
        values, labels = make_blobs(seed=5, n_per_class=20, separation=0.1)
        forest = RandomForestClassifier(n_trees=10, max_depth=3, seed=1).fit(
            values, labels
        )
        out = forest.predict(np.random.default_rng(2).normal(0, 1, (25, 2)))
        assert set(out.tolist()) <= {0, 1}


# ---------------------------------------------------------------- boosting

def xor_dataset():
    base = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    values = np.tile(base, (5, 1))
    labels = np.tile(np.array([0, 1, 1, 0]), 5).astype(np.int64)
    return values, labels


class TestGradientBoosting:
    def test_zero_rounds_is_prior_model(self):
        rng = np.random.default_rng(24)
        values = rng.normal(0, 1, (30, 2))
        labels = np.array([1] * 20 + [0] * 10)
        model = GradientBoostingClassifier(n_rounds=0).fit(values, labels)
        out = model.predict(rng.normal(0, 1, (15, 2)))
        assert np.array_equal(out, np.ones(15, dtype=int))

    def test_loss_non_increasing(self):
        rng = np.random.default_rng(25)
        values = rng.normal(0, 1, (80, 3))
        noisy = (values[:, 0] + rng.normal(0, 0.8, 80) > 0).astype(np.int64)
        for lr in (0.1, 0.3):
            model = GradientBoostingClassifier(
                n_rounds=60, max_depth=2, learning_rate=lr
            ).fit(values, noisy)
            path = np.array(model.train_loss_path_)
            assert np.all(np.diff(path) <= 1e-10)

    def test_xor_is_learned(self):
        values, labels = xor_dataset()
        model = GradientBoostingClassifier(
            n_rounds=50, max_depth=2, learning_rate=0.3
        ).fit(values, labels)
        assert np.array_equal(model.predict(values), labels)

    def test_row_shuffle_invariance(self):
        rng = np.random.default_rng(26)
        values = rng.normal(0, 1, (70, 3))
        labels = (values[:, 1] - values[:, 2] > 0.1).astype(np.int64)
        perm = rng.permutation(70)
        a = GradientBoostingClassifier(n_rounds=30, max_depth=2).fit(values, labels)
        b = GradientBoostingClassifier(n_rounds=30, max_depth=2).fit(
            values[perm], labels[perm]
        )
        queries = rng.normal(0, 1, (40, 3))
        assert np.array_equal(a.predict(queries), b.predict(queries))

    def test_regression_tree_newton_leaf(self):
        # single leaf: value is sum(g)/sum(h)
        tree = RegressionTree(max_depth=0).fit(
            np.zeros((4, 1)), np.array([1.0, 1.0, -1.0, 2.0]),
            np.array([0.5, 0.5, 0.5, 0.5]),
        )
        assert tree.predict(np.zeros((1, 1)))[0] == pytest.approx(3.0 / 2.0)


# ---------------------------------------------------------------- svm

class TestKernelSvm:
    def test_separable_blobs_linear(self):
        values, labels = make_blobs(seed=6, n_per_class=40, separation=5.0)
        model = KernelSvmClassifier(c=1.0, kernel="linear", seed=0).fit(
            values, labels
        )
        test_x, test_y = make_blobs(seed=7, n_per_class=25, separation=5.0)
        assert np.array_equal(model.predict(test_x), test_y)

    def test_dual_objective_non_decreasing(self):
        values, labels = make_blobs(seed=8, n_per_class=30, separation=1.0)
        model = KernelSvmClassifier(
            c=2.0, gamma=0.5, kernel="rbf", seed=3, track_objective=True
        ).fit(values, labels)
        path = np.array(model.objective_path_)
        assert path.size > 1
        assert np.all(np.diff(path) >= -1e-8)

    def test_kkt_audit_at_convergence(self):
        for seed, sep, kernel in ((9, 3.0, "rbf"), (10, 1.5, "rbf"), (11, 4.0, "linear")):
            values, labels = make_blobs(seed=seed, n_per_class=35, separation=sep)
            model = KernelSvmClassifier(
                c=1.0, gamma=0.3, kernel=kernel, seed=seed
            ).fit(values, labels)
            assert model.converged_
            kkt_audit(model, values, labels, tol=model.tol)

    def test_seeded_determinism(self):
        values, labels = make_blobs(seed=12, n_per_class=30, separation=1.0)
        a = KernelSvmClassifier(c=5.0, gamma=1.0, seed=4).fit(values, labels)
        b = KernelSvmClassifier(c=5.0, gamma=1.0, seed=4).fit(values, labels)
        assert np.array_equal(a.alphas_, b.alphas_)
        assert a.bias_ == b.bias_

    def test_zero_decision_maps_to_positive(self):
        values, labels = make_blobs(seed=13, n_per_class=10, separation=3.0)
        model = KernelSvmClassifier(kernel="linear", seed=0).fit(values, labels)
        model.bias_ = 0.0
        model.support_alphas_ = np.zeros_like(model.support_alphas_)
        assert model.predict(np.zeros((1, 2)))[0] == 1


# ---------------------------------------------------------------- dataset-level

@pytest.mark.slow
def test_forest_split_noise_dominates_seed_noise(uci_table):
    """Accuracy varies more across data splits than across forest seeds."""
    from esnbench.data import split
    from esnbench.pipeline import fit_pipeline

    def accuracy(split_seed, forest_seed):
        sp = split(uci_table, 0.2, seed=split_seed)
        fitted = fit_pipeline("rf", uci_table, sp.train_indices, seed=forest_seed,
                              hyper={"n_trees": 200, "max_depth": 8})
        pred = fitted.predict(uci_table.values[sp.test_indices])
        return float((pred == uci_table.labels[sp.test_indices]).mean())

    across_seeds = np.std([accuracy(0, s) for s in range(20)], ddof=1)
    across_splits = np.std([accuracy(s, 0) for s in range(20)], ddof=1)
    assert across_seeds < across_splits
