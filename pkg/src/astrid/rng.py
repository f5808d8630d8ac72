"""Counter-based seed substreams.

Every random draw in the package is taken from a stream identified by a
master seed and a key path, e.g. ``(search, replicate, group, class)``.
Two streams with the same path always produce the same numbers, no matter
in which order or in which process they are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Streams:
    seed: int
    key: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def child(self, *keys: int) -> Streams:
        for k in keys:
            if k < 0:
                raise ValueError("stream keys must be non-negative")
        return Streams(self.seed, self.key + tuple(int(k) for k in keys))

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.seed, spawn_key=self.key)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.sequence()))

    def integer(self) -> int:
        """A 31-bit integer seed, for consumers that take a plain int."""
        return int(self.sequence().generate_state(1, dtype=np.uint32)[0] >> 1)
