"""Seeded random streams.

Every random draw in the package comes from a PCG64 generator derived from a
root seed plus a tuple of integer keys through :class:`numpy.random.SeedSequence`.
PCG64 output is specified bit-for-bit, so reruns match across platforms, and
distinct key tuples give statistically independent streams. Parallel workers
therefore only need ``(seed, unit index)`` to reproduce a serial run.
"""

from __future__ import annotations

import numpy as np

# Stream namespaces. Fixed integers so key tuples never collide between uses.
CODEBOOK = 1
FOLD = 2
SAMPLE = 3
SHOTS = 4
DATASET = 5
LEVELS = 6
PROBABILISTIC_LCU = 7
SHUFFLE = 8


def derive(seed: int, *keys: int) -> np.random.Generator:
    """Return an independent generator for ``(seed, *keys)``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return derive(0 if rng is None else int(rng))
