"""Protocol alignment, negative sampling, the classifier, metrics, tables."""

import math

import numpy as np
import pytest

from oracles import central_difference_gradient, one_window, pairwise_auc
from tgembed.evaluation import (
    EvalError,
    MetricRecord,
    align_protocol,
    edge_embedding,
    edge_feature_matrix,
    evaluate_embedding,
    logistic_gradient,
    logistic_loss,
    mean_gain,
    metrics,
    positive_pairs,
    rank_models,
    sample_negatives,
    split_indices,
    train_logistic,
)
from tgembed.stream import canonicalize, from_triples


def _stream_with_window_counts(counts, tau=10.0):
    """One edge stream whose tau-partition has exactly these bucket sizes."""
    triples = []
    k = 0
    for w, count in enumerate(counts):
        for j in range(count):
            u, v = str(k % 5), str((k + 1) % 5)
            triples.append((u, v, w * tau + j))
            k += 1
    return canonicalize(from_triples(triples))


class TestAlignProtocol:
    COUNTS = [3, 2, 4, 2, 3, 1, 2, 5]

    def test_shared_holdout_and_aligned_views(self):
        stream = _stream_with_window_counts(self.COUNTS)
        alignment = align_protocol(stream, 10.0, train_count=6, offset=0)
        assert alignment.offset == 0
        assert alignment.test_snapshot.index == 7
        assert alignment.epsilon == alignment.test_snapshot.n_edges == 2
        assert [s.index for s in alignment.tau_train.snapshots] == [1, 2, 3, 4, 5, 6]
        assert alignment.train_stream.edges == stream.edges[:15]

    def test_count_view_flushes_at_holdout_boundary(self):
        stream = _stream_with_window_counts(self.COUNTS)
        alignment = align_protocol(stream, 10.0, train_count=6, offset=0)
        assert alignment.eps_skipped == 1
        assert len(alignment.eps_train) == 6
        assert all(s.n_edges == 2 for s in alignment.eps_train.snapshots)
        covered = tuple(e for s in alignment.eps_train.snapshots for e in s.edges)
        assert covered == stream.edges[3:15]
        assert covered[-1] == alignment.tau_train.snapshots[-1].edges[-1]

    def test_default_offset_is_third_clamped_into_range(self):
        stream = _stream_with_window_counts(self.COUNTS)
        alignment = align_protocol(stream, 10.0, train_count=6)
        # a third of 8 windows rounds to 2; only offset 1 leaves a hold-out
        assert alignment.offset == 1
        assert alignment.test_snapshot.index == 8
        assert alignment.epsilon == 5

    def test_explicit_offsets_clamped(self):
        stream = _stream_with_window_counts(self.COUNTS)
        assert align_protocol(stream, 10.0, offset=99).offset == 1
        assert align_protocol(stream, 10.0, offset=-4).offset == 0

    def test_short_prefix_keeps_fewer_count_windows(self):
        stream = _stream_with_window_counts(self.COUNTS)
        alignment = align_protocol(stream, 10.0, train_count=6, offset=1)
        # 17 prefix edges regroup into 3 complete windows of 5
        assert alignment.eps_skipped == 2
        assert len(alignment.eps_train) == 3

    def test_too_few_windows(self):
        stream = _stream_with_window_counts([3, 2])
        with pytest.raises(EvalError, match="need at least 7 snapshots"):
            align_protocol(stream, 10.0)

    def test_rejects_bad_train_count(self):
        stream = _stream_with_window_counts(self.COUNTS)
        with pytest.raises(EvalError, match="train_count must be >= 1"):
            align_protocol(stream, 10.0, train_count=0)

    def test_empty_holdout(self):
        stream = _stream_with_window_counts([3, 0, 1])
        with pytest.raises(EvalError, match="hold-out snapshot holds no edges"):
            align_protocol(stream, 10.0, train_count=1, offset=0)

    def test_prefix_shorter_than_one_count_window(self):
        stream = _stream_with_window_counts([1, 5])
        with pytest.raises(EvalError, match="shorter than one count-based window"):
            align_protocol(stream, 10.0, train_count=1, offset=0)


class TestPositivePairs:
    def test_distinct_sorted_no_self_loops(self):
        snap = one_window(
            [("b", "a", 1.0), ("b", "a", 2.0), ("a", "c", 3.0), ("c", "c", 4.0)]
        )
        assert positive_pairs(snap) == [(0, 1), (1, 2)]

    def test_undirected_pairs_fold(self):
        snap = one_window([("a", "b", 1.0), ("b", "a", 2.0)], directed=False)
        assert positive_pairs(snap) == [(0, 1)]

    def test_directed_keeps_both_orientations(self):
        snap = one_window([("a", "b", 1.0), ("b", "a", 2.0)])
        assert positive_pairs(snap) == [(0, 1), (1, 0)]


class TestSampleNegatives:
    def _snap(self):
        triples = [(str(k), str(k + 1), float(k)) for k in range(7)]
        return one_window(triples)

    def test_deterministic_and_disjoint(self):
        snap = self._snap()
        forbidden = set(positive_pairs(snap))
        first = sample_negatives(snap, None, 10, seed=4)
        second = sample_negatives(snap, None, 10, seed=4)
        assert first == second
        assert len(first) == 10
        assert len(set(first)) == 10
        for u, v in first:
            assert u != v
            assert (u, v) not in forbidden

    def test_restricted_universe(self):
        snap = self._snap()
        pairs = sample_negatives(snap, [0, 1, 2], 4, seed=9)
        assert all(u in {0, 1, 2} and v in {0, 1, 2} for u, v in pairs)

    def test_complete_graph_has_no_negatives(self):
        triples = [
            (a, b, float(k))
            for k, (a, b) in enumerate(
                [("a", "b"), ("b", "a"), ("a", "c"), ("c", "a"), ("b", "c"), ("c", "b")]
            )
        ]
        snap = one_window(triples)
        with pytest.raises(EvalError, match="only 0 non-edges available"):
            sample_negatives(snap, None, 1, seed=0)


class TestEdgeFeatures:
    def test_concatenates_both_rows(self):
        Z = np.arange(6.0).reshape(3, 2)
        np.testing.assert_array_equal(edge_embedding(Z, 0, 2), [0.0, 1.0, 4.0, 5.0])
        np.testing.assert_array_equal(edge_embedding(Z, 1, 1), [2.0, 3.0, 2.0, 3.0])

    def test_rejects_unknown_node(self):
        Z = np.zeros((3, 2))
        with pytest.raises(EvalError, match="outside the node universe"):
            edge_embedding(Z, 0, 3)

    def test_matrix_matches_single_pairs(self):
        Z = np.arange(8.0).reshape(4, 2)
        pairs = [(0, 3), (2, 1)]
        X = edge_feature_matrix(Z, pairs)
        for row, (i, j) in zip(X, pairs):
            np.testing.assert_array_equal(row, edge_embedding(Z, i, j))


class TestLogistic:
    def _instance(self, rng, m=12, dim=3):
        X = rng.standard_normal((m, dim))
        y = rng.integers(0, 2, size=m).astype(float)
        y[0], y[1] = 0.0, 1.0
        return X, y

    def test_gradient_matches_central_differences(self):
        rng = np.random.default_rng(79)
        for reg in (0.0, 0.7):
            X, y = self._instance(rng)
            w = rng.standard_normal(X.shape[1])
            b = float(rng.standard_normal())
            gw, gb = logistic_gradient(X, y, w, b, reg)
            fw, fb = central_difference_gradient(
                lambda w_, b_: logistic_loss(X, y, w_, b_, reg), w, b
            )
            got = np.concatenate([gw, [gb]])
            want = np.concatenate([fw, [fb]])
            err = np.linalg.norm(got - want)
            assert err <= 1e-6 * max(1.0, np.linalg.norm(got))

    def test_converged_fit_sits_at_a_stationary_point(self):
        rng = np.random.default_rng(83)
        X, y = self._instance(rng, m=20)
        model = train_logistic(X, y, reg_strength=0.5, tol=1e-8, max_iter=5000)
        assert model.converged
        fw, fb = central_difference_gradient(
            lambda w_, b_: logistic_loss(X, y, w_, b_, 0.5),
            model.weights,
            model.bias,
        )
        assert math.hypot(np.linalg.norm(fw), fb) < 1e-6

    def test_losses_strictly_decrease_and_match_objective(self):
        rng = np.random.default_rng(89)
        X, y = self._instance(rng, m=30, dim=4)
        model = train_logistic(X, y, reg_strength=0.3)
        assert np.all(np.diff(model.losses) < 0)
        assert model.losses[-1] == logistic_loss(
            X, y, model.weights, model.bias, 0.3
        )

    def test_separable_data_classified_perfectly(self):
        X = np.array([[-3.0], [-2.0], [-1.0], [1.0], [2.0], [3.0]])
        y = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
        model = train_logistic(X, y, reg_strength=1e-3, tol=1e-8, max_iter=5000)
        assert np.mean((model.predict_proba(X) >= 0.5) == (y == 1.0)) == 1.0

    def test_zero_features_learn_the_class_prior(self):
        X = np.zeros((4, 2))
        y = np.array([1.0, 1.0, 1.0, 0.0])
        model = train_logistic(X, y)
        assert np.linalg.norm(model.weights) < 1e-6
        assert model.bias == pytest.approx(math.log(3.0), abs=1e-3)

    def test_stronger_penalty_shrinks_weights(self):
        rng = np.random.default_rng(97)
        X, y = self._instance(rng, m=40, dim=3)
        soft = train_logistic(X, y, reg_strength=0.01)
        hard = train_logistic(X, y, reg_strength=10.0)
        assert np.linalg.norm(hard.weights) < np.linalg.norm(soft.weights)

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(EvalError, match="each class"):
            train_logistic(np.ones((3, 1)), np.ones(3))
        with pytest.raises(EvalError, match="non-finite"):
            train_logistic(np.array([[np.inf], [0.0]]), np.array([1.0, 0.0]))
        with pytest.raises(EvalError, match="does not match"):
            train_logistic(np.ones((3, 1)), np.array([1.0, 0.0]))
        with pytest.raises(EvalError, match="does not match"):
            train_logistic(np.ones(3), np.array([1.0, 0.0, 1.0]))


class TestMetrics:
    def test_hand_cases(self):
        assert metrics(np.array([0.9, 0.8, 0.2, 0.1]), np.array([1, 1, 0, 0]))[0] == 1.0
        assert metrics(np.array([0.5, 0.5, 0.5]), np.array([1, 0, 1]))[0] == 0.5
        assert metrics(np.array([0.9, 0.8, 0.3]), np.array([1, 0, 1]))[0] == 0.5

    def test_threshold_metrics(self):
        scores = np.array([0.9, 0.6, 0.4, 0.1])
        labels = np.array([1, 0, 1, 0])
        auc, acc, f1 = metrics(scores, labels)
        assert acc == 0.5
        assert f1 == pytest.approx(0.5)

    def test_f1_zero_without_true_positives(self):
        _, acc, f1 = metrics(np.array([0.1, 0.2]), np.array([1, 0]))
        assert f1 == 0.0
        assert acc == 0.5

    def test_requires_both_classes(self):
        with pytest.raises(EvalError, match="both classes"):
            metrics(np.array([0.1, 0.9]), np.array([1, 1]))

    def test_matches_pairwise_ordering_exactly(self):
        rng = np.random.default_rng(101)
        for _ in range(60):
            n = int(rng.integers(2, 60))
            labels = rng.integers(0, 2, size=n).astype(float)
            labels[0], labels[1] = 1.0, 0.0
            scores = np.round(rng.uniform(0.0, 1.0, size=n), 1)
            auc, acc, f1 = metrics(scores, labels)
            assert auc == pairwise_auc(scores, labels)
            assert 0.0 <= auc <= 1.0 and 0.0 <= acc <= 1.0 and 0.0 <= f1 <= 1.0


class TestSplitIndices:
    def test_partition_and_clamping(self):
        rng = np.random.default_rng(103)
        train, ev = split_indices(10, 0.75, rng)
        assert len(train) == 8 and len(ev) == 2
        assert sorted(np.concatenate([train, ev])) == list(range(10))
        train, ev = split_indices(2, 0.99, rng)
        assert len(train) == 1 and len(ev) == 1

    def test_rejects_tiny_input(self):
        with pytest.raises(EvalError, match="at least two examples"):
            split_indices(1, 0.5, np.random.default_rng(0))


class TestEvaluateEmbedding:
    def _setup(self, seed=7):
        rng = np.random.default_rng(seed)
        Z = rng.standard_normal((12, 4))
        positives = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)]
        negatives = [(0, 2), (1, 3), (5, 6), (7, 9), (10, 11)]
        return Z, positives, negatives

    def test_deterministic(self):
        Z, pos, neg = self._setup()
        assert evaluate_embedding(Z, pos, neg, seed=3) == evaluate_embedding(
            Z, pos, neg, seed=3
        )

    def test_insensitive_to_embedding_scale(self):
        Z, pos, neg = self._setup()
        base = evaluate_embedding(Z, pos, neg, seed=3)
        scaled = evaluate_embedding(Z * 2.0**40, pos, neg, seed=3)
        assert scaled == base

    def test_constant_columns_are_inert(self):
        Z, pos, neg = self._setup()
        base = evaluate_embedding(Z, pos, neg, seed=3)
        padded = evaluate_embedding(
            np.hstack([Z, np.full((len(Z), 1), 7.5)]), pos, neg, seed=3
        )
        assert padded == base

    def test_rejects_bad_fraction_and_tiny_sets(self):
        Z, pos, neg = self._setup()
        with pytest.raises(EvalError, match="train_fraction"):
            evaluate_embedding(Z, pos, neg, train_fraction=1.0)
        with pytest.raises(EvalError, match="at least two examples"):
            evaluate_embedding(Z, pos[:1], neg, seed=0)


def _record(dataset, method, model, auc, acc=0.5, f1=0.5):
    return MetricRecord(dataset, method, model, auc, acc, f1)


class TestRankModels:
    def test_ties_all_receive_first_rank(self):
        records = [
            MetricRecord("d1", "m1", "A", 0.8, 0.9, 0.5),
            MetricRecord("d1", "m1", "B", 0.8, 0.1, 0.5),
        ]
        table = rank_models(records)
        assert table.counts["A"] == {"auc": 1, "acc": 1, "f1": 1}
        assert table.counts["B"] == {"auc": 1, "acc": 0, "f1": 1}
        assert table.scores == {"A": 3, "B": 2}

    def test_models_keep_first_appearance_order(self):
        records = [
            _record("d1", "m1", "Z", 0.6),
            _record("d1", "m1", "A", 0.5),
        ]
        assert rank_models(records).models == ("Z", "A")

    def test_missing_cell_rejected(self):
        records = [
            _record("d1", "m1", "A", 0.6),
            _record("d1", "m1", "B", 0.5),
            _record("d1", "m2", "A", 0.6),
        ]
        with pytest.raises(EvalError, match=r"lacks models \['B'\]"):
            rank_models(records)

    def test_unique_values_award_one_first_per_cell(self):
        rng = np.random.default_rng(107)
        models = ["A", "B", "C", "D"]
        records = [
            MetricRecord(ds, meth, m, *rng.uniform(0.01, 0.99, size=3))
            for ds in ("d1", "d2")
            for meth in ("m1", "m2")
            for m in models
        ]
        table = rank_models(records)
        for criterion in table.criteria:
            assert sum(table.counts[m][criterion] for m in models) == 4

    def test_scores_invariant_under_monotone_rescaling(self):
        rng = np.random.default_rng(109)
        models = ["A", "B", "C"]
        records = [
            MetricRecord(ds, meth, m, *rng.uniform(0.01, 0.99, size=3))
            for ds in ("d1", "d2")
            for meth in ("m1", "m2")
            for m in models
        ]
        table = rank_models(records)
        warped = [
            MetricRecord(
                r.dataset,
                r.method,
                r.model,
                math.exp(r.auc),
                3.0 * r.acc + 1.0,
                r.f1**3,
            )
            for r in records
        ]
        warped_table = rank_models(warped)
        assert warped_table.counts == table.counts
        assert warped_table.scores == table.scores


class TestMeanGain:
    def test_equal_aucs_gain_nothing(self):
        records = [
            _record("d1", "m1", "ours", 0.5),
            _record("d1", "m1", "base", 0.5),
        ]
        table = mean_gain(records, ["ours"], ["base"])
        assert table.values["ours"]["base"] == 0.0

    def test_relative_percent_difference(self):
        records = [
            _record("d1", "m1", "ours", 0.55),
            _record("d1", "m1", "base", 0.50),
        ]
        table = mean_gain(records, ["ours"], ["base"])
        assert table.values["ours"]["base"] == pytest.approx(10.0, abs=1e-12)

    def test_mean_over_datasets(self):
        records = [
            _record("d1", "m1", "ours", 0.55),
            _record("d1", "m1", "base", 0.50),
            _record("d2", "m1", "ours", 0.60),
            _record("d2", "m1", "base", 0.50),
        ]
        table = mean_gain(records, ["ours"], ["base"])
        assert table.values["ours"]["base"] == pytest.approx(15.0, abs=1e-12)

    def test_methods_average_before_gains(self):
        records = [
            _record("d1", "m1", "ours", 0.6),
            _record("d1", "m2", "ours", 0.4),
            _record("d1", "m1", "base", 0.5),
            _record("d1", "m2", "base", 0.5),
        ]
        table = mean_gain(records, ["ours"], ["base"])
        assert table.values["ours"]["base"] == 0.0

    def test_final_column_averages_baselines(self):
        records = [
            _record("d1", "m1", "ours", 0.6),
            _record("d1", "m1", "b1", 0.5),
            _record("d1", "m1", "b2", 0.4),
        ]
        table = mean_gain(records, ["ours"], ["b1", "b2"])
        assert table.means["ours"] == pytest.approx(
            (20.0 + 50.0) / 2.0, abs=1e-12
        )

    def test_rejects_zero_baseline_and_missing_model(self):
        records = [
            _record("d1", "m1", "ours", 0.6),
            _record("d1", "m1", "base", 0.0),
        ]
        with pytest.raises(EvalError, match="zero AUC"):
            mean_gain(records, ["ours"], ["base"])
        with pytest.raises(EvalError, match="no AUC for model 'ghost'"):
            mean_gain(records[:1], ["ghost"], ["ours"])
