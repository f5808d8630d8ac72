import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from astrid.classifiers import ClassifierSpec
from astrid.data import Partition, split_dataset, validate_partition
from astrid.rng import Streams
from astrid.significance import (
    RewardEstimate,
    TestReport,
    empirical_p_value,
    p_value_from,
    permuted_accuracies,
    reward,
)

from conftest import random_dataset


class Constant:
    def predict(self, X):
        return np.zeros(len(X), dtype=np.int64)


class Lookup:
    def __init__(self, labels):
        self.labels = labels

    def predict(self, X):
        return self.labels


class RiggedLearner:
    """Always right when trained on the original data, always wrong otherwise."""

    def __init__(self, original, test):
        self.key = original.X.tobytes()
        self.test = test

    def __call__(self, d, seed):
        y = self.test.y
        return Lookup(y if d.X.tobytes() == self.key else (y + 1) % self.test.n_classes)


@pytest.fixture(scope="module")
def small_split():
    from astrid.data import generate_synthetic

    return split_dataset(generate_synthetic(60, 9), seed=9)


class TestPValueFormula:
    def test_zero_exceedances(self):
        assert p_value_from(0.9, [0.5] * 250) == 1 / 251

    def test_all_exceed(self):
        assert p_value_from(0.5, [0.5] * 10 + [0.7] * 5) == 1.0

    def test_ties_count(self):
        assert p_value_from(0.8, [0.8, 0.7, 0.9]) == 3 / 4

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=60), st.floats(0, 1), st.randoms())
    def test_bounds_and_order_invariance(self, accs, base, rnd):
        p = p_value_from(base, accs)
        assert 1 / (1 + len(accs)) <= p <= 1
        shuffled = list(accs)
        rnd.shuffle(shuffled)
        assert p_value_from(base, shuffled) == p

    @given(st.lists(st.floats(0, 0.49), min_size=1, max_size=60))
    def test_monotone_exceedance(self, accs):
        base = 0.5
        for i in range(len(accs)):
            before = p_value_from(base, accs)
            accs = accs[:i] + [0.75] + accs[i + 1:]
            assert p_value_from(base, accs) - before == pytest.approx(1 / (1 + len(accs)))

    def test_report_fields(self):
        r = TestReport(Partition.whole(2), 0.8, (0.9, 0.7, 0.8), 0.75, 0.05, False)
        assert r.R == 3 and r.exceedances == 2
        assert r.summary().mean == pytest.approx(0.8)


class TestReward:
    def test_naive_bayes_mean_equals_baseline(self, small_split):
        s = small_split
        spec = ClassifierSpec("naive_bayes")
        for groups in ([[0], [1], [2], [3]], [[0, 1], [2, 3]], [[0, 1, 2, 3]]):
            p = validate_partition(groups, 4)
            est = reward(s.train, s.test_reward, p, spec, 20, Streams(1))
            rep = empirical_p_value(s.train, s.test_reward, p, spec, 20, 0.05, Streams(1))
            assert est.sd == 0 and est.min == est.max == rep.baseline_accuracy
            assert rep.p_value == 1.0 and not rep.rejected

    def test_single_replicate(self, small_split):
        s = small_split
        est = reward(s.train, s.test_reward, Partition.singletons(4), ClassifierSpec(n_trees=10), 1, Streams(2))
        assert est.mean == est.min == est.max and est.sd == 0

    def test_estimate_statistics(self):
        est = RewardEstimate.from_accuracies(Partition.whole(1), [0.5, 0.7, 0.6])
        assert est.mean == pytest.approx(0.6) and est.sd == pytest.approx(0.1)
        assert est.min <= est.mean <= est.max
        with pytest.raises(ValueError):
            RewardEstimate.from_accuracies(Partition.whole(1), [])

    def test_common_random_numbers(self, small_split):
        # two partitions sharing a group get the same shuffle of that group
        s = small_split
        spec = ClassifierSpec("custom", learner=lambda d, seed: Constant())
        a = permuted_accuracies(s.train, s.test_reward, Partition.whole(4), spec, 3, Streams(0))
        assert a == [s.test_reward.class_counts()[0] / s.test_reward.n] * 3


class TestDecision:
    def test_rigged_floor(self, small_split):
        s = small_split
        spec = ClassifierSpec("custom", learner=RiggedLearner(s.train, s.test_select))
        rep = empirical_p_value(s.train, s.test_select, Partition.singletons(4), spec, 99, 0.05, Streams(3))
        assert all(a < rep.baseline_accuracy for a in rep.permuted_accuracies)
        assert rep.p_value == 0.01 and rep.rejected

    def test_constant_classifier(self, small_split):
        s = small_split
        spec = ClassifierSpec("custom", learner=lambda d, seed: Constant())
        rep = empirical_p_value(s.train, s.test_select, Partition.singletons(4), spec, 99, 0.05, Streams(3))
        assert rep.p_value == 1.0 and not rep.rejected

    def test_alpha_range(self, small_split):
        s = small_split
        with pytest.raises(ValueError):
            empirical_p_value(s.train, s.test_select, Partition.whole(4), ClassifierSpec("naive_bayes"), 5, 1.0, Streams(0))

    def test_partition_size_mismatch(self, small_split):
        from astrid.errors import DataError

        s = small_split
        with pytest.raises(DataError):
            reward(s.train, s.test_reward, Partition.whole(3), ClassifierSpec("naive_bayes"), 2, Streams(0))

    def test_bit_identical_across_runs_and_jobs(self, small_split):
        s = small_split
        spec = ClassifierSpec(n_trees=15)
        p = validate_partition([[0, 1], [2], [3]], 4)
        a = empirical_p_value(s.train, s.test_select, p, spec, 12, 0.05, Streams(8))
        b = empirical_p_value(s.train, s.test_select, p, spec, 12, 0.05, Streams(8))
        c = empirical_p_value(s.train, s.test_select, p, spec, 12, 0.05, Streams(8), jobs=2)
        assert a == b == c

    def test_random_data_reports_are_consistent(self, rng):
        d = random_dataset(rng, n=48, m=3)
        s = split_dataset(d, seed=1)
        rep = empirical_p_value(s.train, s.test_select, Partition.singletons(3), ClassifierSpec(n_trees=5), 19, 0.05, Streams(4))
        assert rep.p_value == p_value_from(rep.baseline_accuracy, rep.permuted_accuracies)
        assert rep.rejected == (rep.p_value < rep.alpha)


@given(st.floats(0, 1), st.integers(2, 300))
def test_identical_replicates_have_zero_sd(value, n):
    est = RewardEstimate.from_accuracies(Partition.whole(1), [value] * n)
    assert est.sd == 0.0 and est.mean == value
