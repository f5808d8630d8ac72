"""Within-class, group-coupled permutations.

A plan holds one bijection per attribute column. Rows are only ever mapped
to rows of the same class, and all columns of one group share a bijection,
so the values of a group travel together while different groups are
shuffled independently of each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from astrid.data import Dataset, Partition
from astrid.errors import DataError
from astrid.rng import Streams


@dataclass(frozen=True, eq=False)
class PermutationPlan:
    """``pi[j, i]`` is the source row of cell ``(i, j)`` in the output."""

    pi: np.ndarray

    @property
    def m(self) -> int:
        return self.pi.shape[0]

    @property
    def n(self) -> int:
        return self.pi.shape[1]

    @classmethod
    def identity(cls, n: int, m: int) -> PermutationPlan:
        return cls(np.tile(np.arange(n), (m, 1)))

    def is_within_class(self, labels: np.ndarray) -> bool:
        return bool(np.all(labels[self.pi] == labels[None, :]))

    def is_group_coupled(self, partition: Partition) -> bool:
        return all(np.all(self.pi[list(g)] == self.pi[g[0]]) for g in partition.groups)

    def is_bijective(self) -> bool:
        ref = np.arange(self.n)
        return all(np.array_equal(np.sort(row), ref) for row in self.pi)


def sample_plan(labels: np.ndarray, partition: Partition, rng: Streams) -> PermutationPlan:
    """Draw a plan uniformly from the plans allowed by ``partition``.

    Each (group, class) pair gets its own substream, keyed by the group's
    smallest attribute index and the class code, so a group that appears in
    two different partitions is shuffled identically in both.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if n == 0:
        raise DataError("labels must be non-empty")
    pi = np.empty((partition.m, n), dtype=np.int64)
    blocks = [(c, np.flatnonzero(labels == c)) for c in np.unique(labels)]
    for group in partition.groups:
        row = np.empty(n, dtype=np.int64)
        for c, members in blocks:
            row[members] = rng.child(group[0], int(c)).generator().permutation(members)
        pi[list(group)] = row
    return PermutationPlan(pi)


def apply_plan(d: Dataset, plan: PermutationPlan) -> Dataset:
    if plan.pi.shape != (d.m, d.n):
        raise DataError(f"plan is {plan.m}x{plan.n}, dataset needs {d.m}x{d.n}")
    return d.with_matrix(np.take_along_axis(d.X, plan.pi.T, axis=0))


def goldeneye_permute(d: Dataset, partition: Partition, rng: Streams) -> Dataset:
    if partition.m != d.m:
        raise DataError(f"partition covers {partition.m} attributes, dataset has {d.m}")
    return apply_plan(d, sample_plan(d.y, partition, rng))
