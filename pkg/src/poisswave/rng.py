"""Reproducible random streams for Monte-Carlo replications.

Streams are counter-based (Philox) and keyed by (seed, replication,
purpose), so a run produces bit-identical draws no matter how the
replication loop is ordered or parallelised.
"""

from __future__ import annotations

import numpy as np

# purpose tags; keep stable, they are part of the stream key
SAMPLING = 0
COEFFS = 1
MISC = 2


def substream(seed: int, rep: int = 0, purpose: int = SAMPLING) -> np.random.Generator:
    """Return the generator for one (seed, replication, purpose) cell."""
    if rep < 0 or purpose < 0:
        raise ValueError("rep and purpose must be nonnegative")
    key = np.array([np.uint64(seed), np.uint64((rep << 16) + purpose)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
