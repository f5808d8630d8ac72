import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from astrid.classifiers import ClassifierSpec
from astrid.data import Partition, generate_synthetic, split_dataset, validate_partition
from astrid.rng import Streams
from astrid.search import (
    MonotonicOracle,
    RewardOracle,
    astrid,
    boundary_rewards,
    cluster,
    cut_points,
    og_test2,
    segment,
    select_grouping,
    select_k,
    sort_attributes,
)

from conftest import partitions_of_size


def random_truth(rng, m, k):
    """A random partition of range(m) into exactly k groups."""
    labels = np.concatenate([np.arange(k), rng.integers(0, k, m - k)])
    rng.shuffle(labels)
    return validate_partition([np.flatnonzero(labels == g).tolist() for g in range(k)], m)


def brute_force_best(oracle, m, k):
    return max(oracle.evaluate(validate_partition(p, m)) for p in partitions_of_size(m, k))


class TestSorting:
    @pytest.mark.parametrize("m", range(1, 9))
    def test_call_count(self, m):
        oracle = RewardOracle(lambda p: 0.0)
        sort_attributes(oracle, m)
        assert oracle.calls == m * (m + 1) // 2

    def test_constant_oracle_keeps_index_order(self):
        assert sort_attributes(RewardOracle(lambda p: 1.0), 6) == list(range(6))

    def test_single_attribute(self):
        oracle = RewardOracle(lambda p: 1.0)
        assert sort_attributes(oracle, 1) == [0] and oracle.calls == 1

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 9))
    def test_true_groups_are_contiguous(self, seed, m):
        rng = np.random.default_rng(seed)
        truth = random_truth(rng, m, int(rng.integers(1, m + 1)))
        order = sort_attributes(MonotonicOracle(truth, seed), m)
        pos = {a: i for i, a in enumerate(order)}
        for g in truth.groups:
            idx = sorted(pos[a] for a in g)
            assert idx[-1] - idx[0] == len(g) - 1


class TestSegmentation:
    def test_limits(self):
        order, t = [2, 0, 1, 3], [0.3, 0.1, 0.2]
        assert segment(order, t, 1) == Partition.whole(4)
        assert segment(order, t, 4) == Partition.singletons(4)
        assert segment(order, t, 2).groups == ((0, 1, 3), (2,))
        with pytest.raises(ValueError):
            segment(order, t, 5)

    def test_ties_prefer_smaller_position(self):
        assert cut_points([0.5, 0.5, 0.5], 2) == [1]
        assert cut_points([0.1, 0.5, 0.5], 3) == [2, 3]

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=12))
    def test_boundaries_nest(self, t):
        for k in range(1, len(t) + 1):
            assert set(cut_points(t, k)) <= set(cut_points(t, k + 1))

    @given(st.lists(st.integers(0, 3), min_size=1, max_size=10), st.data())
    def test_segments_are_contiguous(self, t, data):
        m = len(t) + 1
        order = data.draw(st.permutations(range(m)))
        k = data.draw(st.integers(1, m))
        p = segment(order, [float(x) for x in t], k)
        pos = {a: i for i, a in enumerate(order)}
        assert p.k == k
        for g in p.groups:
            idx = sorted(pos[a] for a in g)
            assert idx == list(range(idx[0], idx[0] + len(g)))

    def test_running_example(self):
        truth = validate_partition([[0, 1], [2], [3]], 4)
        assert cluster(MonotonicOracle(truth, 0), 4, 3) == truth


class TestExactness:
    @pytest.mark.parametrize("m", range(2, 7))
    def test_matches_brute_force(self, m):
        rng = np.random.default_rng(m)
        for trial in range(10):
            for k in range(1, m + 1):
                oracle = MonotonicOracle(random_truth(rng, m, k), trial)
                found = cluster(oracle, m, k)
                assert found == oracle.truth
                assert oracle.evaluate(found) == brute_force_best(oracle, m, k)

    def test_oracle_is_monotonic(self):
        truth = validate_partition([[0, 1], [2, 3], [4]], 5)
        oracle = MonotonicOracle(truth, 3)
        parts = [validate_partition(p, 5) for p in partitions_of_size(5, 3)]
        for a in parts:
            fa = oracle.unbroken_mask(a)
            for b in parts:
                fb = oracle.unbroken_mask(b)
                if fa != fb and fa & fb == fa:
                    assert oracle.evaluate(a) < oracle.evaluate(b)

    def test_counter(self):
        oracle = MonotonicOracle(Partition.whole(3))
        oracle(Partition.whole(3))
        oracle.evaluate(Partition.whole(3))
        assert oracle.calls == 1


class TestSelection:
    def test_example_ladder(self):
        assert select_k([None, 0.614, 0.378, 0.004], 0.05) == 3

    def test_all_valid(self):
        assert select_k([None, 1.0, 1.0, 1.0], 0.05) == 4

    def test_fallback(self):
        assert select_k([None, 0.02, 0.01, 0.004], 0.05) == 1

    def test_largest_valid_not_first_invalid(self):
        assert select_k([None, 0.01, 0.3, 0.004], 0.05) == 3


@pytest.fixture(scope="module")
def synthetic_split():
    return split_dataset(generate_synthetic(500, 0), seed=0)


class TestLadder:
    def test_naive_bayes_selects_all_singletons(self, synthetic_split):
        ladder = astrid(synthetic_split, ClassifierSpec("naive_bayes"), Rp=5, R=20, rng=Streams(0))
        assert ladder.selected_k == 4
        assert all(e.p_value == 1.0 for e in ladder.entries[1:])
        assert ladder.oracle_calls == 13

    def test_structure(self, synthetic_split):
        spec = ClassifierSpec(n_trees=20)
        ladder = astrid(synthetic_split, spec, Rp=3, R=9, rng=Streams(1))
        assert ladder.entry(1).partition == Partition.whole(4) and ladder.entry(1).report is None
        assert ladder.entry(4).partition == Partition.singletons(4)
        assert [e.k for e in ladder.entries] == [1, 2, 3, 4]
        assert len(ladder.boundary_rewards) == 3
        k, part, rep = select_grouping(ladder, 0.05)
        assert k == ladder.selected_k and part == ladder.entry(k).partition
        # the all-singleton test reuses the k = m rung's streams
        assert og_test2(synthetic_split, spec, 9, 0.05, Streams(1)) == ladder.entry(4).report

    def test_forest_finds_the_pair(self, synthetic_split):
        ladder = astrid(synthetic_split, ClassifierSpec(), Rp=10, R=19, rng=Streams(0))
        assert ladder.entry(3).partition.groups == ((0, 1), (2,), (3,))
        assert ladder.entry(4).p_value == 1 / 20
