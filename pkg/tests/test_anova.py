import numpy as np
import pytest

from esnbench.anova import anova_f_scores, project, select_top_k

from synth import small_table


def oracle_f_value(column, labels):
    """Literal evaluation of the F statistic from its group-sum definition."""
    classes = sorted(set(labels.tolist()))
    k = len(classes)
    n = len(column)
    overall = column.mean()
    between = 0.0
    within = 0.0
    for c in classes:
        group = column[labels == c]
        between += group.size * (group.mean() - overall) ** 2 / (k - 1)
        within += ((group - group.mean()) ** 2).sum()
    within /= n - k
    if within == 0.0:
        return 0.0 if between == 0.0 else np.inf
    return between / within


class TestFScores:
    def test_hand_example(self):
        t = small_table([[0.0], [1.0], [2.0], [3.0]], [0, 0, 1, 1])
        report = anova_f_scores(t)
        assert report.f_values[0] == pytest.approx(8.0)
        assert report.group_means[0, 0] == pytest.approx(0.5)
        assert report.group_means[1, 0] == pytest.approx(2.5)
        assert report.overall_means[0] == pytest.approx(1.5)
        assert report.n_groups == 2 and report.n_total == 4
        assert sum(report.group_counts) == report.n_total

    def test_equal_means_give_zero(self):
        t = small_table([[0.0], [2.0], [0.0], [2.0]], [0, 0, 1, 1])
        report = anova_f_scores(t)
        assert report.f_values[0] == 0.0
        assert not report.degenerate[0]

    def test_zero_within_gives_infinity(self):
        t = small_table([[0.0], [0.0], [1.0], [1.0]], [0, 0, 1, 1])
        report = anova_f_scores(t)
        assert np.isinf(report.f_values[0])

    def test_degenerate_zero_over_zero(self):
        t = small_table([[3.0], [3.0], [3.0], [3.0]], [0, 0, 1, 1])
        report = anova_f_scores(t)
        assert report.f_values[0] == 0.0
        assert report.degenerate[0]

    def test_single_class_rejected(self):
        t = small_table([[0.0], [1.0]], [1, 1])
        with pytest.raises(ValueError):
            anova_f_scores(t)

    def test_brute_force_equivalence(self):
        rng = np.random.default_rng(42)
        for trial in range(1_000):
            n = int(rng.integers(4, 30))
            d = int(rng.integers(1, 8))
            labels = np.zeros(n, dtype=np.int64)
            labels[: int(rng.integers(1, n))] = 1
            labels = rng.permutation(labels)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            values = rng.normal(0, 1, (n, d))
            # sprinkle degenerate columns
            if trial % 7 == 0:
                values[:, 0] = 1.25
            if trial % 11 == 0 and d > 1:
                values[:, 1] = labels.astype(float)
            report = anova_f_scores(small_table(values, labels))
            for j in range(d):
                expected = oracle_f_value(values[:, j], labels)
                got = report.f_values[j]
                if np.isinf(expected):
                    assert np.isinf(got)
                elif expected == 0.0:
                    assert got == 0.0
                else:
                    assert got == pytest.approx(expected, rel=1e-9)

    def test_affine_invariance(self):
        rng = np.random.default_rng(7)
        values = rng.normal(0, 1, (40, 5))
        labels = (rng.random(40) < 0.6).astype(np.int64)
        labels[:2] = [0, 1]
        base = anova_f_scores(small_table(values, labels))
        shifted = values.copy()
        shifted[:, 2] = -3.0 * shifted[:, 2] + 17.0
        moved = anova_f_scores(small_table(shifted, labels))
        assert moved.f_values[2] == pytest.approx(base.f_values[2], rel=1e-9)
        if np.unique(base.f_values).size == base.f_values.size:
            assert select_top_k(moved, 3) == select_top_k(base, 3)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(9)
        values = rng.normal(0, 1, (30, 4))
        labels = (rng.random(30) < 0.5).astype(np.int64)
        labels[:2] = [0, 1]
        base = anova_f_scores(small_table(values, labels))
        perm = rng.permutation(30)
        shuffled = anova_f_scores(small_table(values[perm], labels[perm]))
        assert np.allclose(base.f_values, shuffled.f_values, rtol=1e-9)
        assert select_top_k(base, 2) == select_top_k(shuffled, 2)


class TestSelectTopK:
    def test_descending_with_index_ties(self):
        t = small_table([[3.0, 3.0, 1.0]] * 2 + [[0.0, 0.0, 0.0]] * 2, [1, 1, 0, 0])
        report = anova_f_scores(t)
        # identical columns 0 and 1 tie; ascending index breaks it
        assert select_top_k(report, 1) == [0]
        assert select_top_k(report, 3) == [0, 1, 2]

    def test_infinity_ranks_first(self):
        values = np.array([
            [0.0, 0.1], [0.0, 0.9], [1.0, 1.6], [1.0, 2.4],
        ])
        report = anova_f_scores(small_table(values, [0, 0, 1, 1]))
        assert np.isinf(report.f_values[0])
        assert select_top_k(report, 1) == [0]

    def test_k_bounds(self, synth_table):
        report = anova_f_scores(synth_table)
        with pytest.raises(ValueError):
            select_top_k(report, 0)
        with pytest.raises(ValueError):
            select_top_k(report, 23)
        full = select_top_k(report, 22)
        assert sorted(full) == list(range(22))
        fv = report.f_values
        assert all(fv[a] >= fv[b] for a, b in zip(full, full[1:]))

    def test_output_is_k_distinct_valid_indices(self, synth_table):
        report = anova_f_scores(synth_table)
        for k in (1, 4, 9, 22):
            out = select_top_k(report, k)
            assert len(out) == k and len(set(out)) == k
            assert all(0 <= i < 22 for i in out)

    def test_uci_top_four(self, uci_table):
        report = anova_f_scores(uci_table)
        picked = {uci_table.feature_names[i] for i in select_top_k(report, 4)}
        assert picked == {"MDVP:Fo(Hz)", "spread1", "spread2", "PPE"}


class TestProject:
    def test_identity(self, synth_table):
        out = project(synth_table, range(synth_table.n_features))
        assert out.feature_names == synth_table.feature_names
        assert np.array_equal(out.values, synth_table.values)

    def test_shape_and_labels(self, synth_table):
        out = project(synth_table, [3, 1, 17, 21])
        assert out.values.shape == (synth_table.n_rows, 4)
        assert out.feature_names == tuple(synth_table.feature_names[i]
                                          for i in (3, 1, 17, 21))
        assert np.array_equal(out.labels, synth_table.labels)

    def test_duplicate_rejected(self, synth_table):
        with pytest.raises(ValueError):
            project(synth_table, [1, 1])

    def test_out_of_range_rejected(self, synth_table):
        with pytest.raises(ValueError):
            project(synth_table, [0, 22])
