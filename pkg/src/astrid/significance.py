"""Randomisation test for a single grouping.

The statistic is the test-set accuracy of a classifier. Its null
distribution comes from retraining on within-class, group-coupled
permutations of the training data; the test set is never permuted.

Stream layout under the ``rng`` handed to these functions::

    rng.child(REPLICATE, i, PERMUTE)   permutation of replicate i
    rng.child(REPLICATE, i, FIT)       training seed of replicate i
    rng.child(BASELINE)                training seed of the unpermuted fit

Because the replicate streams do not depend on the partition, two
partitions evaluated under the same ``rng`` share their random numbers.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from astrid.classifiers import ClassifierSpec, accuracy, train
from astrid.data import Dataset, Partition
from astrid.errors import DataError
from astrid.permutation import goldeneye_permute
from astrid.rng import Streams

REPLICATE, BASELINE = 0, 1
PERMUTE, FIT = 0, 1


@dataclass(frozen=True)
class RewardEstimate:
    partition: Partition
    mean: float
    min: float
    max: float
    sd: float
    replicates: int
    accuracies: tuple[float, ...] = ()

    @classmethod
    def from_accuracies(cls, partition: Partition, accs: Sequence[float]) -> RewardEstimate:
        a = np.asarray(accs, dtype=np.float64)
        if a.size == 0:
            raise ValueError("need at least one replicate")
        mean = float(math.fsum(a) / a.size)
        # fsum can land one ulp outside [min, max] when all values are equal
        mean = min(max(mean, float(a.min())), float(a.max()))
        # deviations from the clamped mean are exactly zero for identical replicates
        sd = math.sqrt(math.fsum((a - mean) ** 2) / (a.size - 1)) if a.size > 1 else 0.0
        return cls(partition, mean, float(a.min()), float(a.max()), sd, int(a.size), tuple(a.tolist()))


@dataclass(frozen=True)
class TestReport:
    partition: Partition
    baseline_accuracy: float
    permuted_accuracies: tuple[float, ...]
    p_value: float
    alpha: float
    rejected: bool

    __test__ = False  # not a pytest class

    @property
    def R(self) -> int:
        return len(self.permuted_accuracies)

    @property
    def exceedances(self) -> int:
        return sum(a >= self.baseline_accuracy for a in self.permuted_accuracies)

    def summary(self) -> RewardEstimate:
        return RewardEstimate.from_accuracies(self.partition, self.permuted_accuracies)


def p_value_from(baseline: float, permuted: Sequence[float]) -> float:
    """``(1 + #{permuted >= baseline}) / (1 + R)``; ties count as exceedances."""
    hits = sum(1 for a in permuted if a >= baseline)
    return (1 + hits) / (1 + len(permuted))


def fit_and_score(train_set: Dataset, test_set: Dataset, spec: ClassifierSpec, seed: int) -> float:
    return accuracy(train(spec.with_seed(seed), train_set), test_set)


def _replicate(train_set: Dataset, test_set: Dataset, partition: Partition, spec: ClassifierSpec, stream: Streams) -> float:
    permuted = goldeneye_permute(train_set, partition, stream.child(PERMUTE))
    return fit_and_score(permuted, test_set, spec, stream.child(FIT).integer())


def permuted_accuracies(
    train_set: Dataset,
    test_set: Dataset,
    partition: Partition,
    spec: ClassifierSpec,
    replicates: int,
    rng: Streams,
    jobs: int = 1,
) -> list[float]:
    if replicates < 1:
        raise ValueError("need at least one replicate")
    if partition.m != train_set.m or test_set.m != train_set.m:
        raise DataError("partition, training and test data disagree on the number of attributes")
    streams = [rng.child(REPLICATE, i) for i in range(replicates)]
    if jobs == 1:
        return [_replicate(train_set, test_set, partition, spec, s) for s in streams]
    tasks = (delayed(_replicate)(train_set, test_set, partition, spec, s) for s in streams)
    return list(Parallel(n_jobs=jobs)(tasks))


def reward(
    train_set: Dataset,
    test_set: Dataset,
    partition: Partition,
    spec: ClassifierSpec,
    Rp: int,
    rng: Streams,
    jobs: int = 1,
) -> RewardEstimate:
    """Mean accuracy over ``Rp`` permuted retrainings, scored on the fixed test set."""
    accs = permuted_accuracies(train_set, test_set, partition, spec, Rp, rng, jobs)
    return RewardEstimate.from_accuracies(partition, accs)


def baseline_accuracy(train_set: Dataset, test_set: Dataset, spec: ClassifierSpec, rng: Streams) -> float:
    return fit_and_score(train_set, test_set, spec, rng.child(BASELINE).integer())


def empirical_p_value(
    train_set: Dataset,
    test_set: Dataset,
    partition: Partition,
    spec: ClassifierSpec,
    R: int,
    alpha: float,
    rng: Streams,
    jobs: int = 1,
    baseline: float | None = None,
) -> TestReport:
    """Test whether ``partition`` is consistent with the training data.

    ``baseline`` may be passed in when several partitions are tested
    against the same data; it must equal ``baseline_accuracy(...)`` for
    the same streams.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if baseline is None:
        baseline = baseline_accuracy(train_set, test_set, spec, rng)
    accs = permuted_accuracies(train_set, test_set, partition, spec, R, rng, jobs)
    p = p_value_from(baseline, accs)
    return TestReport(partition, float(baseline), tuple(float(a) for a in accs), p, alpha, p < alpha)
