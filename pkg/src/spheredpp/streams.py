"""Named, reproducible random substreams.

All randomness in the package flows from one root seed.  Independent
logical streams ('basis', 'points', 'replicate:i', ...) are derived by
hashing the stream name into a spawn key, so replicate-level results do
not depend on execution order or thread scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(root_seed: int, *path) -> np.random.Generator:
    """Generator for the named stream derived from the root seed."""
    name = "/".join(str(p) for p in path)
    digest = hashlib.sha256(name.encode()).digest()
    key = tuple(int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4))
    return np.random.default_rng(np.random.SeedSequence(int(root_seed), spawn_key=key))
