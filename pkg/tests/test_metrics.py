import math

import numpy as np
import pytest

from relrank.errors import DataError
from relrank.metrics import (
    booking_dcg,
    exact_auc,
    normalized_dcg,
    reliability_bins,
    reliability_dcg,
)
from relrank.sessions import SearchSession


def auc_brute_force(scores, labels):
    """Independent oracle: O(n^2) pair enumeration with half credit for ties."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    credit = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                credit += 1.0
            elif p == n:
                credit += 0.5
    return credit / (len(pos) * len(neg))


class TestExactAuc:
    def test_perfect_separation(self):
        assert exact_auc([2.0, 3.0, 0.0, 1.0], [1, 1, 0, 0]) == 1.0

    def test_all_ties_is_half(self):
        assert exact_auc([1.0] * 6, [1, 1, 0, 0, 0, 1]) == 0.5

    def test_three_example_pair_count(self):
        assert exact_auc([0.9, 0.2, 0.5], [1, 1, 0]) == 0.5

    def test_matches_brute_force_with_ties(self):
        rng = np.random.default_rng(123)
        for _ in range(300):
            n = int(rng.integers(2, 60))
            scores = rng.integers(0, 8, size=n).astype(float)  # grid scores force ties
            labels = rng.integers(0, 2, size=n)
            if labels.sum() in (0, n):
                labels[0] = 1 - labels[0]
            assert exact_auc(scores, labels) == auc_brute_force(scores, labels)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(4)
        scores = rng.normal(size=40)
        labels = rng.integers(0, 2, size=40)
        labels[:2] = [0, 1]
        base = exact_auc(scores, labels)
        assert exact_auc(np.exp(scores), labels) == base
        assert exact_auc(3 * scores - 7, labels) == base

    def test_negation_complements_without_ties(self):
        rng = np.random.default_rng(9)
        scores = rng.normal(size=50)  # continuous, ties have measure zero
        labels = rng.integers(0, 2, size=50)
        labels[:2] = [0, 1]
        assert exact_auc(scores, labels) + exact_auc(-scores, labels) == pytest.approx(1.0)

    def test_single_class_raises(self):
        with pytest.raises(DataError):
            exact_auc([0.1, 0.2], [1, 1])


def session(probs, booked=None, base=None, ids=None):
    n = len(probs)
    return SearchSession(
        candidate_ids=np.asarray(ids if ids is not None else np.arange(n)),
        base_scores=np.asarray(base if base is not None else np.zeros(n), dtype=float),
        cs_probs=np.asarray(probs, dtype=float),
        booked_index=booked,
    )


class TestBookingDcg:
    def test_booked_first(self):
        s = session([0.1, 0.2], booked=0)
        assert booking_dcg(s, [0, 1]) == pytest.approx(1.0 / math.log(2.4), abs=1e-15)

    def test_booked_second(self):
        s = session([0.1, 0.2], booked=0)
        assert booking_dcg(s, [1, 0]) == pytest.approx(1.0 / math.log(3.4), abs=1e-15)

    def test_no_booking_scores_zero(self):
        s = session([0.1, 0.2])
        assert booking_dcg(s, [0, 1]) == 0.0

    def test_rejects_non_permutation(self):
        s = session([0.1, 0.2], booked=0)
        with pytest.raises(ValueError):
            booking_dcg(s, [0, 0])


class TestReliabilityDcg:
    def test_all_certain_support_is_zero(self):
        s = session([1.0, 1.0, 1.0])
        assert reliability_dcg(s, [0, 1, 2]) == 0.0

    def test_single_safe_candidate(self):
        s = session([0.0])
        assert reliability_dcg(s, [0]) == pytest.approx(1.0 / math.log(2.4), abs=1e-15)

    def test_safer_candidate_first_scores_higher(self):
        s = session([0.0, 1.0])
        first = reliability_dcg(s, [0, 1])
        second = reliability_dcg(s, [1, 0])
        assert first == pytest.approx(1.0 / math.log(2.4), abs=1e-15)
        assert second == pytest.approx(1.0 / math.log(3.4), abs=1e-15)
        assert first > second

    def test_relabeling_ids_leaves_value_unchanged(self):
        probs = [0.3, 0.8, 0.1]
        a = session(probs, ids=[0, 1, 2])
        b = session(probs, ids=[42, 7, 100])
        order = [2, 0, 1]
        assert reliability_dcg(a, order) == reliability_dcg(b, order)

    def test_configurable_log_base(self):
        s = session([0.0])
        assert reliability_dcg(s, [0], log_base=2.0) == pytest.approx(
            1.0 / math.log2(2.4), abs=1e-15
        )


class TestNormalizedDcg:
    def test_ideal_booking_order_scores_one(self):
        s = session([0.5, 0.5], booked=1)
        assert normalized_dcg(s, [1, 0], kind="booking") == 1.0

    def test_booked_second_of_two(self):
        s = session([0.5, 0.5], booked=0)
        expected = math.log(2.4) / math.log(3.4)
        assert normalized_dcg(s, [1, 0], kind="booking") == pytest.approx(expected, abs=1e-15)

    def test_ascending_probability_order_is_ideal(self):
        s = session([0.7, 0.1, 0.4])
        order = np.argsort(s.cs_probs)
        assert normalized_dcg(s, order, kind="reliability") == pytest.approx(1.0, abs=1e-15)

    def test_all_orderings_stay_in_unit_interval(self):
        import itertools

        rng = np.random.default_rng(17)
        for _ in range(20):
            s = session(rng.uniform(size=4), booked=int(rng.integers(4)))
            for order in itertools.permutations(range(4)):
                for kind in ("booking", "reliability"):
                    v = normalized_dcg(s, list(order), kind=kind)
                    assert 0.0 <= v <= 1.0 + 1e-12

    def test_zero_gain_sessions_raise(self):
        with pytest.raises(DataError):
            normalized_dcg(session([0.5, 0.5]), [0, 1], kind="booking")
        with pytest.raises(DataError):
            normalized_dcg(session([1.0, 1.0]), [0, 1], kind="reliability")


class TestReliabilityBins:
    def test_perfectly_calibrated_draws(self):
        rng = np.random.default_rng(0)
        probs = rng.uniform(size=1_000_000)
        labels = (rng.uniform(size=probs.size) < probs).astype(int)
        _, ece = reliability_bins(probs, labels, n_bins=10)
        assert ece < 0.01

    def test_constant_correct_prediction(self):
        probs = np.full(100, 1.0 - 1e-9)
        labels = np.ones(100, dtype=int)
        _, ece = reliability_bins(probs, labels, n_bins=10)
        assert ece == pytest.approx(0.0, abs=1e-8)

    def test_constant_wrong_prediction(self):
        probs = np.full(50, 0.9)
        labels = np.zeros(50, dtype=int)
        bins, ece = reliability_bins(probs, labels, n_bins=10)
        assert ece == pytest.approx(0.9, abs=1e-15)
        occupied = [b for b in bins if b.count]
        assert len(occupied) == 1
        assert occupied[0].count == 50
        assert occupied[0].observed_rate == 0.0

    def test_bin_structure(self):
        probs = np.array([0.05, 0.15, 0.999, 1.0])
        labels = np.array([0, 0, 1, 1])
        bins, _ = reliability_bins(probs, labels, n_bins=10)
        assert len(bins) == 10
        assert bins[0].count == 1 and bins[1].count == 1
        assert bins[9].count == 2  # p = 1.0 folds into the last bin
        assert sum(b.count for b in bins) == 4

    def test_empty_input_raises(self):
        with pytest.raises(DataError):
            reliability_bins(np.array([]), np.array([]), n_bins=10)
