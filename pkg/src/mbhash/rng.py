"""Counter-based random streams keyed by ``(master seed, *keys)``.

Each trial gets ``stream(seed, trial_id)``; streams are independent of the
order in which trials are executed, so parallel and serial runs agree bit
for bit.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part: int | str) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode()) | (1 << 32)
    if part < 0:
        raise ValueError("stream keys must be non-negative")
    return int(part)


def stream(seed: int, *keys: int | str) -> np.random.Generator:
    """Philox generator for ``seed`` and a path of integer/string keys."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return stream(0 if rng is None else int(rng))
