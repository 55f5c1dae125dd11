"""Counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by
``(master_seed, *indices, role)``. A stream depends only on its key, never on
the order in which work was scheduled, so parallel and sequential runs see
identical numbers.

Usage:
    rng = stream(seed, trial_index, role=StreamRole.CLOCKS)
    buf = UniformBuffer(rng)
    u = buf.next()
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class StreamRole(IntEnum):
    GRAPH = 0          # generator draws for one graph sample
    CLOCKS = 1         # holding times of the contact process
    MARKS = 2          # event choice and thinning labels
    TRAJECTORIES = 3   # interlacement trajectories
    CAPACITY = 4       # equilibrium-measure escape walks
    BOOTSTRAP = 5      # confidence-interval resampling
    UNIT = 6           # seeds handed from the harness to a work unit


def stream(master_seed: int, *indices: int, role: StreamRole) -> np.random.Generator:
    """Return the Philox generator for ``(master_seed, *indices, role)``."""
    key = tuple(int(i) for i in indices) + (int(role),)
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(master_seed: int, *indices: int) -> int:
    """Derive a child u64 seed from a master seed and an index path."""
    seq = np.random.SeedSequence(
        entropy=int(master_seed),
        spawn_key=tuple(int(i) for i in indices) + (int(StreamRole.UNIT),),
    )
    return int(seq.generate_state(1, dtype=np.uint64)[0])


class UniformBuffer:
    """Block-buffered U(0,1) draws for tight Python event loops."""

    def __init__(self, rng: np.random.Generator, block: int = 4096) -> None:
        self._rng = rng
        self._block = block
        self._values: list[float] = []
        self._pos = 0

    def next(self) -> float:
        if self._pos >= len(self._values):
            self._values = self._rng.random(self._block).tolist()
            self._pos = 0
        u = self._values[self._pos]
        self._pos += 1
        return u

    def next_positive(self) -> float:
        """Uniform on (0, 1), safe for ``log``."""
        u = self.next()
        while u == 0.0:
            u = self.next()
        return u
