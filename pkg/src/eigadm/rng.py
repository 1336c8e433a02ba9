"""Seeded, splittable random streams.

A stream is an immutable ``(seed, stream_id)`` pair. Children are derived by
hashing the parent together with an index, so replicate ``k`` always sees the
same draws no matter how work is scheduled across workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
# domain separation for the derivation hash
_DERIVE_TAG = 0x6569676164_6D


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream_id", int(self.stream_id))

    def generator(self) -> np.random.Generator:
        """Fresh Philox generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(seq))


def derive_stream(root: RngStream, index: int) -> RngStream:
    """Child stream of ``root`` labelled by ``index``.

    The child id is a 64-bit hash of ``(seed, stream_id, index)``; it only
    depends on those integers, so it is identical on every platform.
    """
    if not 0 <= int(index) <= _MASK64:
        raise ValueError(f"index must be an unsigned 64-bit integer, got {index!r}")
    seq = np.random.SeedSequence([_DERIVE_TAG, root.seed, root.stream_id, int(index)])
    child = int(seq.generate_state(1, np.uint64)[0])
    return RngStream(root.seed, child)
