import numpy as np
import pytest

from spectral_uq.selective import (
    UndefinedMetricError,
    arc_curve,
    auarc,
    auroc,
    oracle_curve,
)


def auroc_enumerated(u, correct):
    """Independent oracle: walk every (incorrect, correct) pair."""
    u = np.asarray(u, dtype=float)
    correct = np.asarray(correct, dtype=bool)
    wins = ties = 0
    for ui in u[~correct]:
        for uc in u[correct]:
            if ui > uc:
                wins += 1
            elif ui == uc:
                ties += 1
    total = (~correct).sum() * correct.sum()
    return (wins + 0.5 * ties) / total


def random_table(rng, n=None, tie_prone=False):
    n = n or int(rng.integers(2, 60))
    while True:
        correct = rng.uniform(size=n) < rng.uniform(0.2, 0.8)
        if correct.any() and not correct.all():
            break
    if tie_prone:
        u = rng.integers(0, 8, size=n) / 7.0
    else:
        u = rng.uniform(size=n)
    return u, correct


class TestArcCurve:
    def test_all_correct_flat_one(self):
        curve = arc_curve([0.3, 0.1, 0.9], [True, True, True])
        np.testing.assert_array_equal(curve.accuracies, 1.0)
        np.testing.assert_allclose(curve.fractions, [0, 1 / 3, 2 / 3])

    def test_all_incorrect_flat_zero(self):
        curve = arc_curve([0.3, 0.1], [False, False])
        np.testing.assert_array_equal(curve.accuracies, 0.0)

    def test_hand_trace(self):
        curve = arc_curve(
            [0.1, 0.2, 0.8, 0.9], [True, True, False, False]
        )
        np.testing.assert_allclose(curve.fractions, [0.0, 0.25, 0.5, 0.75])
        np.testing.assert_allclose(curve.accuracies, [0.5, 2 / 3, 1.0, 1.0])

    def test_first_point_is_base_accuracy(self, rng):
        for _ in range(20):
            u, correct = random_table(rng)
            curve = arc_curve(u, correct)
            assert curve.accuracies[0] == correct.mean()

    def test_tie_break_by_question_id(self):
        # equal uncertainties: rejection eats ids in lexicographic order
        u = [0.5, 0.5, 0.5]
        correct = [False, True, True]
        ids = ["a", "b", "c"]
        curve = arc_curve(u, correct, question_ids=ids)
        # "a" (incorrect) rejected first
        np.testing.assert_allclose(curve.accuracies, [2 / 3, 1.0, 1.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            arc_curve([], [])


class TestAuarc:
    def test_flat_one(self):
        assert auarc(arc_curve([0.1, 0.2], [True, True])) == 1.0

    def test_hand_value(self):
        curve = arc_curve([0.1, 0.2, 0.8, 0.9], [True, True, False, False])
        assert auarc(curve) == pytest.approx((0.5 + 2 / 3 + 1 + 1) / 4, abs=1e-12)

    def test_constant_scores_give_base_accuracy_curve(self):
        # all scores equal: every rejection order is id-determined; with
        # correctness mixed the curve wobbles, but a flat all-same-label
        # table stays at its base accuracy
        curve = arc_curve([0.5] * 5, [True] * 5)
        assert auarc(curve) == 1.0


class TestOracleCurve:
    def test_closed_form_n10_c5(self):
        labels = [True] * 5 + [False] * 5
        curve = oracle_curve(labels)
        expect = [min(1.0, 5 / (10 - k)) for k in range(10)]
        np.testing.assert_allclose(curve.accuracies, expect, atol=0)

    def test_matches_arc_with_oracle_scores(self, rng):
        for _ in range(20):
            _, correct = random_table(rng)
            oracle_scores = np.where(correct, 0.0, 1.0)
            via_arc = arc_curve(oracle_scores, correct)
            direct = oracle_curve(correct)
            np.testing.assert_allclose(direct.accuracies, via_arc.accuracies, atol=1e-12)

    def test_all_correct(self):
        np.testing.assert_array_equal(oracle_curve([True, True]).accuracies, 1.0)

    def test_all_incorrect(self):
        np.testing.assert_array_equal(oracle_curve([False, False]).accuracies, 0.0)


class TestAuroc:
    def test_perfect_separation(self):
        assert auroc([0.1, 0.9], [True, False]) == 1.0

    def test_all_tied_is_half(self):
        assert auroc([0.4, 0.4, 0.4], [True, False, True]) == 0.5

    def test_hand_pairs(self):
        # pairs: (0.4 vs 0.2) win, (0.4 vs 0.6) loss
        assert auroc([0.2, 0.6, 0.4], [True, True, False]) == 0.5

    def test_degenerate_labels_are_undefined(self):
        with pytest.raises(UndefinedMetricError, match="undefined"):
            auroc([0.1, 0.2], [True, True])
        with pytest.raises(UndefinedMetricError, match="undefined"):
            auroc([0.1, 0.2], [False, False])

    def test_matches_pair_enumeration_exactly(self, rng):
        for _ in range(60):
            u, correct = random_table(rng, tie_prone=bool(rng.integers(0, 2)))
            assert auroc(u, correct) == auroc_enumerated(u, correct)


class TestRankInvariance:
    def test_monotone_transforms_leave_metrics_unchanged(self, rng):
        for transform in (np.exp, lambda x: 2 * x + 1):
            for _ in range(20):
                u, correct = random_table(rng, tie_prone=True)
                ids = [f"q{i:03d}" for i in range(len(u))]
                base_curve = arc_curve(u, correct, question_ids=ids)
                t_curve = arc_curve(transform(u), correct, question_ids=ids)
                np.testing.assert_allclose(
                    t_curve.accuracies, base_curve.accuracies, atol=0
                )
                assert auroc(transform(u), correct) == auroc(u, correct)

    def test_oracle_dominates_every_method(self, rng):
        for _ in range(50):
            u, correct = random_table(rng)
            method = auarc(arc_curve(u, correct))
            oracle = auarc(oracle_curve(correct))
            assert oracle >= method - 1e-12
