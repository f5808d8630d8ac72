"""Reward-only clustering of attributes and the per-cardinality ladder.

The search needs nothing but a reward for each candidate partition. It
first orders the attributes by repeatedly detaching the one whose removal
into a singleton costs the least reward, then scores every two-way split
of that ordering and cuts at the best ``k - 1`` split points. Lines up
with the brute-force optimum whenever breaking a true group always lowers
the reward.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from astrid.classifiers import ClassifierSpec
from astrid.data import Partition, SplitTriple, validate_partition
from astrid.rng import Streams
from astrid.significance import (
    RewardEstimate,
    TestReport,
    baseline_accuracy,
    empirical_p_value,
    reward,
)

log = logging.getLogger(__name__)

SEARCH, SELECT = 0, 1


class RewardOracle:
    """Counts evaluations of a partition -> reward function."""

    def __init__(self, fn: Callable[[Partition], float] | None = None):
        self._fn = fn
        self.calls = 0

    def evaluate(self, partition: Partition) -> float:
        if self._fn is None:
            raise NotImplementedError
        return self._fn(partition)

    def __call__(self, partition: Partition) -> float:
        self.calls += 1
        return float(self.evaluate(partition))


class MonotonicOracle(RewardOracle):
    """Synthetic reward that drops whenever a ground-truth group is broken.

    The reward of a partition depends only on the set F of ground-truth
    groups it leaves unbroken: ``|F| + u(F)`` with ``u`` a fixed random
    value in [0, 1) per set. A strict subset of unbroken groups always
    scores strictly lower, and the ordering among incomparable sets is
    arbitrary.
    """

    def __init__(self, truth: Partition, seed: int = 0):
        super().__init__()
        self.truth = truth
        self.seed = seed
        self._u: dict[int, float] = {}

    def bonus(self, mask: int) -> float:
        if mask not in self._u:
            self._u[mask] = float(np.random.default_rng([self.seed, mask]).random())
        return self._u[mask]

    def unbroken_mask(self, partition: Partition) -> int:
        owner = partition.group_of()
        mask = 0
        for g, members in enumerate(self.truth.groups):
            if len({owner[j] for j in members}) == 1:
                mask |= 1 << g
        return mask

    def evaluate(self, partition: Partition) -> float:
        mask = self.unbroken_mask(partition)
        return bin(mask).count("1") + self.bonus(mask)


def sort_attributes(oracle: RewardOracle, m: int) -> list[int]:
    """Order attributes by greedy detachment (ties: smallest index)."""
    remaining = list(range(m))
    detached: list[int] = []
    while remaining:
        best_j, best_r = -1, -np.inf
        for j in remaining:
            rest = [a for a in remaining if a != j]
            groups = ([rest] if rest else []) + [[a] for a in detached + [j]]
            r = oracle(validate_partition(groups, m))
            if r > best_r:
                best_j, best_r = j, r
        remaining.remove(best_j)
        detached.append(best_j)
    return detached


def boundary_rewards(oracle: RewardOracle, ordering: Sequence[int]) -> list[float]:
    """Reward of every prefix/suffix split of ``ordering``."""
    m = len(ordering)
    return [
        oracle(validate_partition([ordering[:i], ordering[i:]], m))
        for i in range(1, m)
    ]


def cut_points(boundary: Sequence[float], k: int) -> list[int]:
    """Positions of the ``k - 1`` largest boundary rewards (ties: smaller position)."""
    ranked = sorted(range(len(boundary)), key=lambda i: (-boundary[i], i))
    return sorted(i + 1 for i in ranked[: k - 1])


def segment(ordering: Sequence[int], boundary: Sequence[float], k: int) -> Partition:
    m = len(ordering)
    if not 1 <= k <= m:
        raise ValueError(f"k must be in 1..{m}, got {k}")
    if len(boundary) != m - 1:
        raise ValueError("need one boundary reward per adjacent pair")
    edges = [0] + cut_points(boundary, k) + [m]
    return validate_partition([ordering[a:b] for a, b in zip(edges, edges[1:])], m)


def cluster(oracle: RewardOracle, m: int, k: int) -> Partition:
    ordering = sort_attributes(oracle, m)
    return segment(ordering, boundary_rewards(oracle, ordering), k)


@dataclass(frozen=True)
class LadderEntry:
    k: int
    partition: Partition
    summary: RewardEstimate | None = None
    report: TestReport | None = None

    @property
    def p_value(self) -> float | None:
        return None if self.report is None else self.report.p_value


@dataclass(frozen=True)
class GroupingLadder:
    ordering: tuple[int, ...]
    boundary_rewards: tuple[float, ...]
    entries: tuple[LadderEntry, ...]
    baseline_accuracy: float | None = None
    oracle_calls: int = 0
    selected_k: int | None = None

    @property
    def m(self) -> int:
        return len(self.ordering)

    def entry(self, k: int) -> LadderEntry:
        return self.entries[k - 1]


def select_k(p_values: Sequence[float | None], alpha: float) -> int:
    """Largest k whose p-value is at least ``alpha``; k = 1 always qualifies.

    ``p_values[k - 1]`` belongs to cardinality k; the first is ignored.
    """
    best = 1
    for k, p in enumerate(p_values, start=1):
        if k > 1 and p is not None and p >= alpha:
            best = k
    return best


def select_grouping(ladder: GroupingLadder, alpha: float) -> tuple[int, Partition, TestReport | None]:
    k = select_k([e.p_value for e in ladder.entries], alpha)
    e = ladder.entry(k)
    return k, e.partition, e.report


def astrid(
    split: SplitTriple,
    spec: ClassifierSpec,
    Rp: int = 100,
    R: int = 250,
    alpha: float = 0.05,
    rng: Streams | None = None,
    jobs: int = 1,
) -> GroupingLadder:
    """Find the best grouping for every k, then test each one.

    Rewards use ``split.test_reward``; p-values use ``split.test_select``.
    Every reward evaluation reuses the same permutation streams.
    """
    rng = rng or Streams(0)
    m = split.train.m
    search = rng.child(SEARCH)

    def evaluate(p: Partition) -> float:
        return reward(split.train, split.test_reward, p, spec, Rp, search, jobs).mean

    oracle = RewardOracle(evaluate)
    log.info("sorting %d attributes", m)
    ordering = sort_attributes(oracle, m)
    t = boundary_rewards(oracle, ordering)
    log.info("ordering %s, %d reward evaluations", [a + 1 for a in ordering], oracle.calls)

    select = rng.child(SELECT)
    base = baseline_accuracy(split.train, split.test_select, spec, select)
    entries = [LadderEntry(1, Partition.whole(m))]
    for k in range(2, m + 1):
        part = segment(ordering, t, k)
        rep = empirical_p_value(
            split.train, split.test_select, part, spec, R, alpha, select.child(k), jobs, baseline=base
        )
        log.info("k=%d %s p=%.3f", k, part, rep.p_value)
        entries.append(LadderEntry(k, part, rep.summary(), rep))
    chosen = select_k([e.p_value for e in entries], alpha)
    return GroupingLadder(tuple(ordering), tuple(t), tuple(entries), base, oracle.calls, chosen)


def og_test2(
    split: SplitTriple,
    spec: ClassifierSpec,
    R: int = 250,
    alpha: float = 0.05,
    rng: Streams | None = None,
    jobs: int = 1,
) -> TestReport:
    """All-singleton test on the selection split.

    Uses the same streams as the k = m rung of :func:`astrid`, so for the
    same ``rng`` the two reports coincide.
    """
    rng = rng or Streams(0)
    m = split.train.m
    select = rng.child(SELECT)
    base = baseline_accuracy(split.train, split.test_select, spec, select)
    return empirical_p_value(
        split.train, split.test_select, Partition.singletons(m), spec, R, alpha, select.child(m), jobs, baseline=base
    )
