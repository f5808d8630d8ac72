"""Surrogate data by validated shuffling, and how many original rows survive it.

Rows of two different sources can be fused the same way: stack them into
one Dataset and shuffle with a grouping that keeps each source's columns
together; the result is exactly what :func:`anonymize` returns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from astrid.data import Dataset, Partition
from astrid.permutation import goldeneye_permute
from astrid.rng import Streams


@dataclass(frozen=True)
class AnonymityReport:
    partition: Partition
    replicates: int
    unique_original_rows: int
    intact_rows: tuple[int, ...]
    p_anon: float

    @property
    def per_replicate(self) -> tuple[float, ...]:
        return tuple(c / self.unique_original_rows for c in self.intact_rows)


def anonymize(d: Dataset, partition: Partition, rng: Streams) -> Dataset:
    """Shuffle ``d`` within classes, keeping each group's columns together."""
    return goldeneye_permute(d, partition, rng)


def row_keys(d: Dataset) -> set[bytes]:
    """Bitwise identity of each (attribute values, label) row."""
    full = np.column_stack([d.X, d.y.astype(np.float64)])
    return {row.tobytes() for row in np.ascontiguousarray(full)}


def intact_count(original: Dataset, shuffled: Dataset) -> tuple[int, int]:
    """(unique original rows, how many of them occur anywhere in ``shuffled``)."""
    orig = row_keys(original)
    return len(orig), len(orig & row_keys(shuffled))


def measure_p_anon(original: Dataset, partition: Partition, replicates: int, rng: Streams) -> AnonymityReport:
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    orig = row_keys(original)
    counts = tuple(
        len(orig & row_keys(anonymize(original, partition, rng.child(i))))
        for i in range(replicates)
    )
    p = float(np.mean([c / len(orig) for c in counts]))
    return AnonymityReport(partition, replicates, len(orig), counts, p)
