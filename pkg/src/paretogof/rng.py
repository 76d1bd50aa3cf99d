"""Counter-based random streams.

Every random draw in the package comes from a :class:`RngStream`, which is
identified by a master seed plus a tuple of stream indices.  The stream is a
pure function of that identity, so replications can be farmed out to any
number of workers without changing a single bit of the results.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _as_u64(value, name):
    value = int(value)
    if not 0 <= value <= _MASK64:
        raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {value}")
    return value


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by ``(master_seed, *path)``.

    ``path`` holds the stream index and any nested sub-indices, e.g.
    ``(replication, 1, chunk)`` for a bootstrap chunk inside a replication.
    """

    master_seed: int
    path: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "master_seed", _as_u64(self.master_seed, "master_seed"))
        object.__setattr__(
            self, "path", tuple(_as_u64(p, "stream_index") for p in self.path)
        )

    @property
    def stream_index(self):
        return self.path[0] if self.path else 0

    def seed_sequence(self):
        return np.random.SeedSequence(self.master_seed, spawn_key=self.path)

    @property
    def seed64(self):
        """64-bit digest of the stream identity (what actually seeds the generator)."""
        return int(self.seed_sequence().generate_state(1, np.uint64)[0])

    def generator(self):
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def child(self, *indices):
        return RngStream(self.master_seed, self.path + tuple(indices))


def derive_substream(master_seed, index, *sub):
    """Return the stream for ``index`` (and optional nested sub-indices).

    Stateless: the same arguments always give the same stream, and distinct
    indices give distinct streams.
    """
    return RngStream(master_seed, (index,) + tuple(sub))
